#include "scirel/types.hpp"

namespace scirel {

std::string_view label_name(RelationLabel label) {
  switch (label) {
    case RelationLabel::None: return "None";
    case RelationLabel::SynonymOf: return "Synonym-of";
    case RelationLabel::HyponymOf: return "Hyponym-of";
    case RelationLabel::HypernymOf: return "Hypernym-of";
  }
  throw std::logic_error("bad RelationLabel");
}

RelationLabel parse_label(std::string_view name) {
  if (name == "None") return RelationLabel::None;
  if (name == "Synonym-of") return RelationLabel::SynonymOf;
  if (name == "Hyponym-of") return RelationLabel::HyponymOf;
  if (name == "Hypernym-of") return RelationLabel::HypernymOf;
  throw std::invalid_argument("unknown relation label: " + std::string(name));
}

std::string_view etype_name(EntityType etype) {
  switch (etype) {
    case EntityType::Process: return "Process";
    case EntityType::Task: return "Task";
    case EntityType::Material: return "Material";
  }
  throw std::logic_error("bad EntityType");
}

EntityType parse_etype(std::string_view name) {
  if (name == "Process") return EntityType::Process;
  if (name == "Task") return EntityType::Task;
  if (name == "Material") return EntityType::Material;
  throw std::invalid_argument("unknown entity type: " + std::string(name));
}

const EntityMention* Document::find_entity(std::string_view entity_id) const {
  for (const auto& entity : entities) {
    if (entity.id == entity_id) return &entity;
  }
  return nullptr;
}

}  // namespace scirel
