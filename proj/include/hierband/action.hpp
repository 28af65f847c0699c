#pragma once

#include <string>

namespace hierband {

/// One round's choice: recommend an item or ask about a key-term.
struct Action {
  enum class Kind { Item, KeyTerm };

  Kind kind;
  int id;

  static Action item(int id) { return {Kind::Item, id}; }
  static Action keyterm(int id) { return {Kind::KeyTerm, id}; }

  bool is_item() const { return kind == Kind::Item; }
  bool is_keyterm() const { return kind == Kind::KeyTerm; }

  bool operator==(const Action&) const = default;
};

inline std::string to_string(const Action& a) {
  return (a.is_item() ? "item:" : "keyterm:") + std::to_string(a.id);
}

}  // namespace hierband
