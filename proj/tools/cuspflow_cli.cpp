#include <cstdio>

int main() {
  std::puts("cuspflow: placeholder");
  return 0;
}
