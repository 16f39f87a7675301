#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bi/source.hpp"

namespace bi {

/* -------------------------------------------------------------------------- */
/* Domains                                                                     */
/* -------------------------------------------------------------------------- */

struct Domain;
using DomainPtr = std::shared_ptr<const Domain>;

/// A finite, enumerable value set. Every field, operation parameter and
/// constant ranges over one of these; sequences are bounded so state spaces
/// stay finite.
struct Domain {
  enum class Kind { Bool, Int, Enum, Seq };

  Kind kind = Kind::Bool;

  // Int
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  // Enum (name may be empty for anonymous enums, which is what the surface
  // syntax produces)
  std::string enum_name;
  std::vector<std::string> literals;

  // Seq
  DomainPtr elem;
  std::uint32_t max_len = 0;

  static DomainPtr boolean();
  static DomainPtr int_range(std::int64_t lo, std::int64_t hi);
  static DomainPtr enumeration(std::string name, std::vector<std::string> literals);
  static DomainPtr bounded_seq(DomainPtr elem, std::uint32_t max_len);

  /// Number of values, saturating at 2^63 to keep arithmetic safe.
  /// Seq(d, n) has sum_{k=0..n} |d|^k values.
  std::uint64_t cardinality() const;

  bool operator==(const Domain& other) const;
  bool operator!=(const Domain& other) const { return !(*this == other); }

  /// Canonical surface syntax, e.g. "int 0..3" or "seq(enum {a, b}, 4)".
  std::string str() const;
};

/* -------------------------------------------------------------------------- */
/* Values                                                                      */
/* -------------------------------------------------------------------------- */

/// A concrete value. Sequences and integers are unconstrained here; domains
/// only restrict what a *variable* may bind to, so intermediate results of
/// expression evaluation (say, an over-long concatenation) are representable.
struct Value {
  struct EnumV {
    DomainPtr domain;  // for printing the literal name
    std::uint32_t index = 0;
  };
  using SeqV = std::vector<Value>;

  std::variant<bool, std::int64_t, EnumV, SeqV> v;

  Value() : v(false) {}

  static Value boolean(bool b) {
    Value v;
    v.v = b;
    return v;
  }
  static Value integer(std::int64_t i);
  static Value enum_lit(DomainPtr domain, std::uint32_t index);
  static Value seq(SeqV elems);

  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
  bool is_enum() const { return std::holds_alternative<EnumV>(v); }
  bool is_seq() const { return std::holds_alternative<SeqV>(v); }

  bool as_bool() const { return std::get<bool>(v); }
  std::int64_t as_int() const { return std::get<std::int64_t>(v); }
  const EnumV& as_enum() const { return std::get<EnumV>(v); }
  const SeqV& as_seq() const { return std::get<SeqV>(v); }

  bool operator==(const Value& other) const;
  bool operator!=(const Value& other) const { return !(*this == other); }
  bool operator<(const Value& other) const;  // enumeration order within one domain

  std::size_t hash() const;

  /// Canonical surface syntax: "true", "3", "a", "<a, b>", "<>".
  std::string str() const;
};

/// True iff v is a member of d (recursively for sequences).
bool value_in_domain(const Value& v, const Domain& d);

/* -------------------------------------------------------------------------- */
/* Expressions                                                                 */
/* -------------------------------------------------------------------------- */

enum class VarKind { State, PrimedState, Input, Output };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Predicate/term syntax over state, primed-state, input and output
/// variables. Nodes are immutable and shared; spans are carried for
/// diagnostics and ignored by structural equality.
struct Expr {
  enum class Kind {
    Var,
    Lit,
    EmptySeq,
    // unary (operand in lhs)
    Not,
    Head,
    Tail,
    Len,
    IsEmpty,
    // binary
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    And,
    Or,
    Implies,
    SeqAppend,  // s ++ <x>: append one element
    SeqConcat,
  };

  Kind kind = Kind::Lit;
  VarKind var_kind = VarKind::State;  // Var only
  std::string name;                   // Var only
  Value lit;                          // Lit only
  ExprPtr lhs;
  ExprPtr rhs;
  SourceSpan span;

  static ExprPtr var(std::string name, VarKind k, SourceSpan span = {});
  static ExprPtr literal(Value v, SourceSpan span = {});
  static ExprPtr empty_seq(SourceSpan span = {});
  static ExprPtr unary(Kind k, ExprPtr operand, SourceSpan span = {});
  static ExprPtr binary(Kind k, ExprPtr lhs, ExprPtr rhs, SourceSpan span = {});

  static ExprPtr truth();  // shared "true" literal

  bool is_unary() const;
  bool is_binary() const;
};

/// Structural equality, ignoring source spans.
bool expr_equal(const ExprPtr& a, const ExprPtr& b);

/// True iff e is the literal true (the default invariant/init/final).
bool is_trivially_true(const ExprPtr& e);

/// Conjunction that folds left and drops literal-true operands.
ExprPtr conjoin(ExprPtr a, ExprPtr b);

/* -------------------------------------------------------------------------- */
/* Classes and hierarchies                                                     */
/* -------------------------------------------------------------------------- */

struct Param {
  std::string name;
  DomainPtr domain;

  bool operator==(const Param& other) const;
  bool operator!=(const Param& other) const { return !(*this == other); }
};

enum class OpMode { Specializes, Introduces };

/// One operation: a relation between before/after states plus input and
/// output bindings, given by a single predicate body.
struct OperationSpec {
  std::string name;
  std::vector<Param> inputs;
  std::vector<Param> outputs;
  ExprPtr body;
  OpMode mode = OpMode::Introduces;
};

struct ConstantDef {
  std::string name;
  DomainPtr domain;
  Value value;
};

struct ClassSpec {
  std::string name;
  bool abstract = false;
  std::optional<std::string> parent;
  std::vector<Param> own_fields;
  ExprPtr own_invariant;  // state vars only; defaults to true
  ExprPtr init;           // primed vars only; defaults to true
  ExprPtr final_cond;     // state vars only; defaults to true
  std::vector<OperationSpec> operations;
  std::vector<ConstantDef> constants;

  ClassSpec();

  const OperationSpec* find_op(const std::string& op_name) const;
};

/// A universally quantified predicate over the extension of one class:
/// every existing object of that class (including objects of descendants)
/// must satisfy `body`, an expression over the class's state fields.
struct GlobalConstraint {
  std::string class_name;
  ExprPtr body;
};

struct Hierarchy {
  std::vector<ClassSpec> classes;
  std::vector<GlobalConstraint> global_constraints;

  const ClassSpec* find(const std::string& name) const;
  int index_of(const std::string& name) const;  // -1 when absent

  /// Parent chain from the class itself up to its root, in that order.
  /// Stops at a repeated class so it terminates even on cyclic input.
  std::vector<const ClassSpec*> ancestor_chain(const std::string& name) const;

  /// True iff `anc` equals `desc` or is a proper ancestor of it.
  bool is_ancestor_or_self(const std::string& anc, const std::string& desc) const;

  /// Inherited fields followed by own fields, root first.
  std::vector<Param> effective_fields(const std::string& name) const;

  /// Conjunction of every ancestor invariant and the class's own, root first.
  ExprPtr effective_invariant(const std::string& name) const;

  /// Nearest declaration of `op_name` at `name` or above; null when absent.
  const OperationSpec* find_op_at_or_above(const std::string& name,
                                           const std::string& op_name) const;
  /// The class that hosts find_op_at_or_above's result.
  const ClassSpec* op_host(const std::string& name, const std::string& op_name) const;

  /// Operation names visible on a class, in root-down declaration order.
  std::vector<std::string> effective_op_names(const std::string& name) const;

  /// Classes without a parent, in declaration order.
  std::vector<const ClassSpec*> roots() const;

  /// Nearest common ancestor (by name), or nullopt.
  std::optional<std::string> common_ancestor(const std::string& a,
                                             const std::string& b) const;
};

bool hierarchy_equal(const Hierarchy& a, const Hierarchy& b);

/* -------------------------------------------------------------------------- */
/* Structural validation                                                       */
/* -------------------------------------------------------------------------- */

struct StructuralError {
  enum class Code {
    DuplicateClass,
    UnknownParent,
    CyclicParent,
    DuplicateField,
    DuplicateConstant,
    DuplicateOperation,
    DuplicateParam,
    InvalidDomain,
    InvalidConstantValue,
    SignatureMismatch,    // specializes without a matching ancestor signature
    IntroducesExisting,   // introduces although an ancestor declares the name
    TypeError,            // ill-typed invariant/init/final/body/constraint
    UnknownConstraintClass,
  };

  Code code;
  std::string class_name;  // may be empty
  std::string member;      // field/op/constant name; may be empty
  std::string message;
};

const char* structural_error_code_name(StructuralError::Code code);

/// Structural and type validation of a hierarchy. Purely syntactic: no state
/// enumeration happens here. Returns an empty list iff the hierarchy is
/// well-formed; deterministic and independent of declaration order beyond
/// the order errors are reported in.
std::vector<StructuralError> validate(const Hierarchy& h);

}  // namespace bi
