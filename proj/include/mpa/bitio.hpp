#pragma once

#include <cstdint>
#include <vector>

#include "mpa/errors.hpp"

namespace mpa {

class BitWriter {
  public:
    void put_bits(uint64_t value, int count) {
        for (int i = count - 1; i >= 0; --i) {
            const int bit = static_cast<int>((value >> i) & 1u);
            if (bit_pos_ == 0) bytes_.push_back(0);
            bytes_.back() = static_cast<uint8_t>(bytes_.back() | (bit << (7 - bit_pos_)));
            bit_pos_ = (bit_pos_ + 1) & 7;
        }
    }

    // Pad with zero bits to the next byte boundary.
    std::vector<uint8_t> finish() {
        bit_pos_ = 0;
        return std::move(bytes_);
    }

    size_t bit_count() const { return bytes_.size() * 8 - (bit_pos_ ? 8 - bit_pos_ : 0); }

  private:
    std::vector<uint8_t> bytes_;
    int bit_pos_ = 0;
};

class BitReader {
  public:
    BitReader(const uint8_t* data, size_t size) : data_(data), size_(size) {}

    int get_bit() {
        const size_t byte = pos_ >> 3;
        if (byte >= size_) throw MalformedSequence("bitstream exhausted");
        const int bit = (data_[byte] >> (7 - (pos_ & 7))) & 1;
        ++pos_;
        return bit;
    }

    uint64_t get_bits(int count) {
        uint64_t v = 0;
        for (int i = 0; i < count; ++i) v = (v << 1) | static_cast<uint64_t>(get_bit());
        return v;
    }

  private:
    const uint8_t* data_;
    size_t size_;
    size_t pos_ = 0;
};

}  // namespace mpa
