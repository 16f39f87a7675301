#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bi/model.hpp"

namespace bi {

/// Bounds-erased type used when checking expressions. Integer ranges and
/// sequence bounds do not matter for well-typedness; only variable binding
/// (during enumeration) consults them.
struct Type {
  enum class Kind { Bool, Int, Enum, Seq, EmptySeq };

  Kind kind = Kind::Bool;
  DomainPtr enum_domain;        // Enum
  std::shared_ptr<Type> elem;   // Seq

  static Type boolean() { return {Kind::Bool, nullptr, nullptr}; }
  static Type integer() { return {Kind::Int, nullptr, nullptr}; }
  static Type enumeration(DomainPtr d) { return {Kind::Enum, std::move(d), nullptr}; }
  static Type seq(Type e) {
    return {Kind::Seq, nullptr, std::make_shared<Type>(std::move(e))};
  }
  static Type empty_seq() { return {Kind::EmptySeq, nullptr, nullptr}; }

  bool same(const Type& other) const;
  std::string str() const;
};

/// EmptySeq unifies with any sequence type.
std::optional<Type> unify(const Type& a, const Type& b);

Type type_of_domain(const Domain& d);

struct TypeIssue {
  SourceSpan span;      // meaningful only for parsed expressions
  std::string member;   // "invariant"/"init"/"final"/op name/"constraint"
  std::string message;
};

/// Which variable kinds are in scope, and over which signatures.
struct ExprScope {
  const std::vector<Param>* state = nullptr;
  const std::vector<Param>* primed = nullptr;
  const std::vector<Param>* inputs = nullptr;
  const std::vector<Param>* outputs = nullptr;
  std::string member;
};

/// Checks that `e` is a well-typed boolean predicate under `scope`.
std::vector<TypeIssue> typecheck_predicate(const ExprPtr& e, const ExprScope& scope);

/// Checks invariant, init, final and every operation body of one class.
std::vector<TypeIssue> typecheck_class(const Hierarchy& h, const ClassSpec& c);

/// Checks a global-constraint body over the attached class's state fields.
std::vector<TypeIssue> typecheck_constraint(const Hierarchy& h, const ClassSpec& c,
                                            const ExprPtr& body);

}  // namespace bi
