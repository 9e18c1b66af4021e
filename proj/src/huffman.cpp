#include "mpa/huffman.hpp"

#include <algorithm>
#include <queue>

namespace mpa {

namespace {

struct Node {
    uint64_t freq;
    uint32_t min_symbol;  // deterministic tie break
    int left = -1;
    int right = -1;
    uint32_t symbol = 0;
    bool leaf = false;
};

}  // namespace

HuffmanCode HuffmanCode::from_histogram(const std::unordered_map<uint32_t, uint64_t>& freq) {
    HuffmanCode code;
    if (freq.empty()) return code;

    std::vector<Node> nodes;
    nodes.reserve(freq.size() * 2);
    for (const auto& [symbol, count] : freq) {
        nodes.push_back(Node{count, symbol, -1, -1, symbol, true});
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const Node& a, const Node& b) { return a.min_symbol < b.min_symbol; });

    if (nodes.size() == 1) {
        code.entries_.push_back(Entry{nodes[0].symbol, 1, 0});
        code.assign_codes();
        return code;
    }

    auto cmp = [&nodes](int a, int b) {
        if (nodes[static_cast<size_t>(a)].freq != nodes[static_cast<size_t>(b)].freq) {
            return nodes[static_cast<size_t>(a)].freq > nodes[static_cast<size_t>(b)].freq;
        }
        return nodes[static_cast<size_t>(a)].min_symbol > nodes[static_cast<size_t>(b)].min_symbol;
    };
    std::priority_queue<int, std::vector<int>, decltype(cmp)> heap(cmp);
    for (size_t i = 0; i < nodes.size(); ++i) heap.push(static_cast<int>(i));

    while (heap.size() > 1) {
        const int a = heap.top();
        heap.pop();
        const int b = heap.top();
        heap.pop();
        Node parent;
        parent.freq = nodes[static_cast<size_t>(a)].freq + nodes[static_cast<size_t>(b)].freq;
        parent.min_symbol = std::min(nodes[static_cast<size_t>(a)].min_symbol,
                                     nodes[static_cast<size_t>(b)].min_symbol);
        parent.left = a;
        parent.right = b;
        nodes.push_back(parent);
        heap.push(static_cast<int>(nodes.size() - 1));
    }

    // Depth-first walk collecting leaf depths.
    std::vector<std::pair<int, int>> stack{{heap.top(), 0}};
    while (!stack.empty()) {
        const auto [idx, depth] = stack.back();
        stack.pop_back();
        const Node& node = nodes[static_cast<size_t>(idx)];
        if (node.leaf) {
            code.entries_.push_back(Entry{node.symbol, static_cast<uint8_t>(std::max(depth, 1)), 0});
        } else {
            stack.emplace_back(node.left, depth + 1);
            stack.emplace_back(node.right, depth + 1);
        }
    }
    code.assign_codes();
    return code;
}

void HuffmanCode::assign_codes() {
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
        if (a.length != b.length) return a.length < b.length;
        return a.symbol < b.symbol;
    });
    uint64_t next = 0;
    int prev_len = entries_.empty() ? 0 : entries_.front().length;
    for (Entry& e : entries_) {
        next <<= (e.length - prev_len);
        prev_len = e.length;
        e.code = next++;
    }
    index_.clear();
    for (size_t i = 0; i < entries_.size(); ++i) index_[entries_[i].symbol] = i;
}

void HuffmanCode::encode(BitWriter& writer, uint32_t symbol) const {
    const auto it = index_.find(symbol);
    if (it == index_.end()) throw MalformedSequence("symbol missing from huffman table");
    const Entry& e = entries_[it->second];
    writer.put_bits(e.code, e.length);
}

uint32_t HuffmanCode::decode(BitReader& reader) const {
    uint64_t code = 0;
    int length = 0;
    size_t i = 0;
    while (i < entries_.size()) {
        while (length < entries_[i].length) {
            code = (code << 1) | static_cast<uint64_t>(reader.get_bit());
            ++length;
        }
        // Codes of one length are consecutive in canonical order.
        size_t j = i;
        while (j < entries_.size() && entries_[j].length == length) ++j;
        if (code >= entries_[i].code && code - entries_[i].code < j - i) {
            return entries_[i + (code - entries_[i].code)].symbol;
        }
        i = j;
    }
    throw MalformedSequence("invalid huffman code");
}

int HuffmanCode::length_of(uint32_t symbol) const {
    const auto it = index_.find(symbol);
    if (it == index_.end()) return 0;
    return entries_[it->second].length;
}

void HuffmanCode::serialize(std::vector<uint8_t>& out) const {
    out.push_back(static_cast<uint8_t>(entries_.size() & 0xff));
    out.push_back(static_cast<uint8_t>((entries_.size() >> 8) & 0xff));
    for (const Entry& e : entries_) {
        out.push_back(static_cast<uint8_t>(e.symbol & 0xff));
        out.push_back(static_cast<uint8_t>((e.symbol >> 8) & 0xff));
        out.push_back(e.length);
    }
}

HuffmanCode HuffmanCode::deserialize(const std::vector<uint8_t>& data, size_t& pos) {
    if (pos + 2 > data.size()) throw MalformedSequence("huffman table truncated");
    const size_t count = static_cast<size_t>(data[pos]) | (static_cast<size_t>(data[pos + 1]) << 8);
    pos += 2;
    HuffmanCode code;
    code.entries_.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        if (pos + 3 > data.size()) throw MalformedSequence("huffman table truncated");
        const uint32_t symbol =
            static_cast<uint32_t>(data[pos]) | (static_cast<uint32_t>(data[pos + 1]) << 8);
        const uint8_t length = data[pos + 2];
        pos += 3;
        if (length == 0 || length > 60) throw MalformedSequence("bad huffman code length");
        code.entries_.push_back(Entry{symbol, length, 0});
    }
    code.assign_codes();
    return code;
}

}  // namespace mpa
