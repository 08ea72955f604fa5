#include "fmcf/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace fmcf {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return {buf.data(), end};
}

}  // namespace fmcf
