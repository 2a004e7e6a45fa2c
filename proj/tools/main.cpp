#include <cstdio>

int main() {
    std::puts("orbitcert: subcommands not wired yet");
    return 64;
}
