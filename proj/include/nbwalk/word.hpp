#pragma once

// Persistent reduced words: vertex identities of lazily generated trees.
//
// A word is an immutable cons-list of symbols sharing its prefixes with the
// words it was grown from, so extending or truncating by one letter is O(1)
// and equality usually stops at the first shared ancestor node.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace nbwalk {

class Word {
 public:
  using Symbol = std::uint8_t;

  Word() = default;
  Word(const Word&) = default;
  Word(Word&&) noexcept = default;
  Word& operator=(const Word&) = default;
  Word& operator=(Word&&) noexcept = default;

  ~Word() {
    // Unwind uniquely owned chains iteratively; deep words would otherwise
    // recurse once per letter in the shared_ptr destructors.
    auto node = std::move(node_);
    while (node && node.use_count() == 1) node = std::move(node->parent);
  }

  bool empty() const noexcept { return !node_; }
  std::size_t depth() const noexcept { return node_ ? node_->depth : 0; }
  Symbol last() const noexcept { return node_->symbol; }
  std::uint64_t hash() const noexcept { return node_ ? node_->hash : kEmptyHash; }

  Word parent() const { return node_ ? Word(node_->parent) : Word(); }

  Word push(Symbol s) const {
    auto n = std::make_shared<Node>();
    n->parent = node_;
    n->symbol = s;
    n->depth = depth() + 1;
    n->hash = mix(hash() * 0x100000001b3ULL + s + 1);
    return Word(std::move(n));
  }

  std::vector<Symbol> symbols() const {
    std::vector<Symbol> out(depth());
    const Node* n = node_.get();
    for (std::size_t i = out.size(); i-- > 0; n = n->parent.get()) out[i] = n->symbol;
    return out;
  }

  /// Letters 'a', 'b', ... from the root outwards.
  std::string to_string() const {
    std::string s;
    for (auto c : symbols()) s.push_back(static_cast<char>('a' + c));
    return s;
  }

  friend bool operator==(const Word& a, const Word& b) noexcept {
    const Node* x = a.node_.get();
    const Node* y = b.node_.get();
    if (a.depth() != b.depth() || a.hash() != b.hash()) return false;
    while (x != y) {
      if (x->symbol != y->symbol) return false;
      x = x->parent.get();
      y = y->parent.get();
    }
    return true;
  }

 private:
  struct Node {
    std::shared_ptr<Node> parent;
    std::uint64_t hash = 0;
    std::uint32_t depth = 0;
    Symbol symbol = 0;
  };

  static constexpr std::uint64_t kEmptyHash = 0x84222325cbf29ce4ULL;

  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  explicit Word(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  std::shared_ptr<Node> node_;
};

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept { return static_cast<std::size_t>(w.hash()); }
};

}  // namespace nbwalk
