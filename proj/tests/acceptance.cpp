// Placeholder acceptance runner; criteria are filled in incrementally.
#include <cstdio>
int main() {
  std::puts("acceptance: not yet implemented");
  return 1;
}
