int main()
//@ requires true;
//@ ensures result == 10;
{
  int i = 0;
  while (true)
  //@ invariant 0 <= i && i <= 10;
  {
    if (i == 10) {
      return i;
    }
    i = i + 1;
  }
  return 0 - 1;
}
