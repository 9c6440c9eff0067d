int clamp(int v, int hi) {
  if (v > hi)
    return hi;
  return v;
}

int main() {
  int x = clamp(12, 10);
  //@ assert x <= 10;
  return 0;
}
