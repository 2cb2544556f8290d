#ifndef SCIREL_TYPES_HPP
#define SCIREL_TYPES_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scirel {

enum class RelationLabel { None, SynonymOf, HyponymOf, HypernymOf };

enum class EntityType { Process, Task, Material };

std::string_view label_name(RelationLabel label);
RelationLabel parse_label(std::string_view name);

std::string_view etype_name(EntityType etype);
EntityType parse_etype(std::string_view name);

// Annotated entity mention. Offsets are half-open byte offsets into the
// document text (standoff convention).
struct EntityMention {
  std::string id;
  EntityType etype = EntityType::Process;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string surface;

  bool operator==(const EntityMention&) const = default;
};

// Gold relation between two entity ids. For Hyponym-of, arg1 is the hyponym
// and arg2 the hypernym. Synonym-of is symmetric.
struct GoldRelation {
  RelationLabel label = RelationLabel::None;
  std::string arg1;
  std::string arg2;

  bool operator==(const GoldRelation&) const = default;
};

struct Document {
  std::string id;
  std::string text;
  std::vector<EntityMention> entities;
  std::vector<GoldRelation> gold;

  const EntityMention* find_entity(std::string_view entity_id) const;

  bool operator==(const Document&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line_no)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + message),
        line(line_no) {}
  std::size_t line;
};

using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
  if (sink) sink->push_back(std::move(message));
}

}  // namespace scirel

#endif  // SCIREL_TYPES_HPP
