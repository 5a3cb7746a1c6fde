#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lmrec {

// Fixed-universe dynamic bitset over 64-bit blocks. States and reachability
// sets are bitsets over interned fact ids; action pre/add/del stay as sorted
// id vectors since they are short.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(std::size_t num_bits)
        : num_bits_(num_bits), blocks_((num_bits + 63) / 64, 0) {}

    std::size_t size() const { return num_bits_; }

    bool test(std::size_t i) const {
        return (blocks_[i >> 6] >> (i & 63)) & 1;
    }
    void set(std::size_t i) { blocks_[i >> 6] |= std::uint64_t(1) << (i & 63); }
    void reset(std::size_t i) {
        blocks_[i >> 6] &= ~(std::uint64_t(1) << (i & 63));
    }
    void clear() {
        for (auto &b : blocks_) b = 0;
    }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto b : blocks_) n += static_cast<std::size_t>(__builtin_popcountll(b));
        return n;
    }

    bool none() const {
        for (auto b : blocks_)
            if (b) return false;
        return true;
    }

    Bitset &operator|=(const Bitset &o) {
        for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] |= o.blocks_[i];
        return *this;
    }

    bool intersects(const Bitset &o) const {
        for (std::size_t i = 0; i < blocks_.size(); ++i)
            if (blocks_[i] & o.blocks_[i]) return true;
        return false;
    }

    bool is_subset_of(const Bitset &o) const {
        for (std::size_t i = 0; i < blocks_.size(); ++i)
            if (blocks_[i] & ~o.blocks_[i]) return false;
        return true;
    }

    friend bool operator==(const Bitset &a, const Bitset &b) {
        return a.num_bits_ == b.num_bits_ && a.blocks_ == b.blocks_;
    }

    std::size_t hash() const {
        std::size_t h = blocks_.size();
        for (auto b : blocks_) h ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }

private:
    std::size_t num_bits_ = 0;
    std::vector<std::uint64_t> blocks_;
};

struct BitsetHash {
    std::size_t operator()(const Bitset &b) const { return b.hash(); }
};

} // namespace lmrec
