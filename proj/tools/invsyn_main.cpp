/* SPDX-License-Identifier: Apache-2.0 */

#include <cstdio>

int main()
{
  std::fprintf(stderr, "invsyn: command-line frontend not wired up yet\n");
  return 64;
}
