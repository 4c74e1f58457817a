#include <cstdio>
#include <cstring>

#include "satsw/accept.hpp"

int main(int argc, char** argv) {
    bool fast = false;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--fast") == 0) fast = true;

    auto results = satsw::accept::runAcceptanceSuite(fast);
    std::fputs(satsw::accept::formatResults(results).c_str(), stdout);
    return satsw::accept::allPassed(results) ? 0 : 1;
}
