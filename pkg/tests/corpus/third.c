int third(int x)
//@ requires -100 <= x && x <= 100;
//@ ensures result == x / 3 && -34 <= result && result <= 34;
{
  int t = x / 3;
  {
    int u = t;
    t = u;
  }
  return t;
}
