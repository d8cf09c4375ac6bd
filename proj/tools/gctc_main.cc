// tools/gctc_main.cc  (stub, replaced below)
int main() { return 0; }
