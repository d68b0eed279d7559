int abs_value(int a)
//@ requires -2147483647 <= a;
//@ ensures 0 <= result && (result == a || result == -a);
{
  if (a < 0) {
    return -a;
  } else {
    return a;
  }
}
