int twice(int x) {
  return 2 * x;
}

int apply(int (*f)(int), int x) {
  return f(x);
}

int main() {
  int r = apply(twice, 3);
  //@ assert r == 6;
  return 0;
}
