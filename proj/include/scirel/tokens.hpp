#ifndef SCIREL_TOKENS_HPP
#define SCIREL_TOKENS_HPP

#include <cstddef>
#include <string>

namespace scirel {

// Half-open byte range into a document text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
  bool contains(std::size_t offset) const { return offset >= start && offset < end; }
  bool overlaps(const Span& other) const { return start < other.end && other.start < end; }
};

struct Token {
  std::string surface;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string pos;

  Span span() const { return {start, end}; }
  bool operator==(const Token&) const = default;
};

}  // namespace scirel

#endif  // SCIREL_TOKENS_HPP
