#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace coordcap {

using SymIdx = std::uint32_t;

// A named finite alphabet with a fixed symbol ordering. Symbol indices are
// stable for the lifetime of the value.
class Alphabet {
 public:
  Alphabet(std::string name, std::vector<std::string> symbols)
      : name_(std::move(name)), symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw std::invalid_argument("alphabet '" + name_ + "' has no symbols");
    std::unordered_set<std::string> seen;
    for (const auto& s : symbols_)
      if (!seen.insert(s).second)
        throw std::invalid_argument("alphabet '" + name_ + "' has duplicate symbol '" + s + "'");
  }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  const std::string& symbol(SymIdx i) const { return symbols_.at(i); }

  SymIdx index_of(const std::string& symbol) const {
    for (std::size_t i = 0; i < symbols_.size(); ++i)
      if (symbols_[i] == symbol) return static_cast<SymIdx>(i);
    throw std::invalid_argument("symbol '" + symbol + "' not in alphabet '" + name_ + "'");
  }

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.name_ == b.name_ && a.symbols_ == b.symbols_;
  }
  friend bool operator!=(const Alphabet& a, const Alphabet& b) { return !(a == b); }

 private:
  std::string name_;
  std::vector<std::string> symbols_;
};

inline Alphabet binary_alphabet(std::string name) {
  return Alphabet(std::move(name), {"0", "1"});
}

inline Alphabet indexed_alphabet(std::string name, std::size_t size) {
  std::vector<std::string> syms;
  syms.reserve(size);
  for (std::size_t i = 0; i < size; ++i) syms.push_back(std::to_string(i));
  return Alphabet(std::move(name), std::move(syms));
}

}  // namespace coordcap
