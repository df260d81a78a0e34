#include "randbc/multiply.hpp"

namespace randbc {

std::size_t padded_size(std::size_t size, std::size_t n, std::size_t depth) {
    if (n == 0) throw std::invalid_argument("grid dimension must be positive");
    std::size_t block = 1;
    for (std::size_t q = 0; q < depth; ++q) block *= n;
    const std::size_t m = std::max<std::size_t>(1, (size + block - 1) / block);
    return m * block;
}

}  // namespace randbc
