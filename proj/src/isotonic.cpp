#include "mmdflow/isotonic.hpp"

#include <cstddef>

namespace mmdflow {

std::vector<double> isotonic_projection(const std::vector<double>& y) {
    struct Block {
        double mean;
        std::size_t size;
    };
    std::vector<Block> blocks;
    blocks.reserve(y.size());
    for (double v : y) {
        blocks.push_back({v, 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
            const Block top = blocks.back();
            blocks.pop_back();
            Block& prev = blocks.back();
            const std::size_t size = prev.size + top.size;
            prev.mean = (prev.mean * prev.size + top.mean * top.size) / static_cast<double>(size);
            prev.size = size;
        }
    }
    std::vector<double> out;
    out.reserve(y.size());
    for (const auto& b : blocks) out.insert(out.end(), b.size, b.mean);
    return out;
}

} // namespace mmdflow
