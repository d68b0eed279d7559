int identity(int a)
//@ requires true;
//@ ensures result == 0;
{
  return a;
}
