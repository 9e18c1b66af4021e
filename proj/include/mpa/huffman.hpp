#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "mpa/bitio.hpp"

namespace mpa {

// Canonical Huffman code over sparse uint32 symbol ids. Codes are assigned
// from the length table sorted by (length, symbol), so encoder and decoder
// agree given the same table.
class HuffmanCode {
  public:
    // Build optimal code lengths from a symbol histogram. A single-symbol
    // alphabet gets a 1-bit code.
    static HuffmanCode from_histogram(const std::unordered_map<uint32_t, uint64_t>& freq);

    void encode(BitWriter& writer, uint32_t symbol) const;
    uint32_t decode(BitReader& reader) const;

    // Table layout: u16 count, then (u16 symbol, u8 length) per entry in
    // canonical order.
    void serialize(std::vector<uint8_t>& out) const;
    static HuffmanCode deserialize(const std::vector<uint8_t>& data, size_t& pos);

    size_t table_bytes() const { return 2 + entries_.size() * 3; }
    int length_of(uint32_t symbol) const;

  private:
    struct Entry {
        uint32_t symbol;
        uint8_t length;
        uint64_t code;
    };
    void assign_codes();

    std::vector<Entry> entries_;  // sorted by (length, symbol)
    std::unordered_map<uint32_t, size_t> index_;
};

}  // namespace mpa
