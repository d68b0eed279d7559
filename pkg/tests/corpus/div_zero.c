int main()
//@ requires true;
//@ ensures true;
{
  return 1 / 0;
}
