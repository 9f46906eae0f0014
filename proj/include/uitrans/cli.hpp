#pragma once

#include <string>
#include <vector>

#include <iostream>

namespace uitrans {

inline int run_cli(const std::vector<std::string>& args) {
    (void)args;
    std::cerr << "uitrans: not implemented yet" << std::endl;
    return 2;
}

}  // namespace uitrans
