#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "bi/model.hpp"

namespace bi {

constexpr std::uint64_t kDefaultStateCap = 1'000'000;

/// Raised when a state space (or the candidate-transition grid of one
/// operation) exceeds the configured cap.
struct StateSpaceTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotAnAncestor : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Evaluation over an ill-typed environment; indicates a front-end bug,
/// never user error.
struct EvalInternalError : std::logic_error {
  using std::logic_error::logic_error;
};

/* -------------------------------------------------------------------------- */
/* Bindings and spaces                                                         */
/* -------------------------------------------------------------------------- */

/// An ordered (name, Domain) signature with name lookup.
struct FieldSig {
  std::vector<Param> fields;
  std::unordered_map<std::string, std::size_t> index;

  static FieldSig of(std::vector<Param> fields);
  std::optional<std::size_t> find(const std::string& name) const;
};

/// Values for one signature, positionally aligned with it.
struct Binding {
  std::vector<Value> values;

  bool operator==(const Binding& other) const { return values == other.values; }
  bool operator!=(const Binding& other) const { return !(*this == other); }
};

struct BindingHash {
  std::size_t operator()(const Binding& b) const {
    std::size_t h = b.values.size();
    for (const auto& v : b.values)
      h ^= v.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

/// Maps a binding to "name = value, ..." in signature order.
std::string binding_str(const FieldSig& sig, const Binding& b);

/// The full domain product over a signature, in deterministic order: the
/// first field varies slowest; domain order is false<true, ascending
/// integers, declaration order for enum literals, and length-then-
/// lexicographic for sequences.
struct BindingSpace {
  FieldSig sig;
  std::vector<Binding> all;
  std::unordered_map<Binding, std::uint32_t, BindingHash> index;

  std::uint32_t index_of(const Binding& b) const;
  std::optional<std::uint32_t> find(const Binding& b) const;
};

/// All values of one domain, in the deterministic order above.
std::vector<Value> domain_values(const DomainPtr& d);

/// Product enumeration with a cap; throws StateSpaceTooLarge.
BindingSpace enumerate_bindings(std::vector<Param> sig, std::uint64_t cap,
                                const std::string& what);

/// The invariant-satisfying subset of the field product of one class.
struct StateSpace {
  std::string class_name;
  FieldSig fields;
  std::vector<Binding> states;
  std::unordered_map<Binding, std::uint32_t, BindingHash> index;

  std::uint32_t index_of(const Binding& b) const;
  std::optional<std::uint32_t> find(const Binding& b) const;
};

/* -------------------------------------------------------------------------- */
/* Evaluation                                                                  */
/* -------------------------------------------------------------------------- */

/// Variable environment for eval: any subset of the four variable kinds.
struct EvalEnv {
  const FieldSig* state = nullptr;
  const Binding* state_vals = nullptr;
  const FieldSig* primed = nullptr;
  const Binding* primed_vals = nullptr;
  const FieldSig* inputs = nullptr;
  const Binding* input_vals = nullptr;
  const FieldSig* outputs = nullptr;
  const Binding* output_vals = nullptr;
};

/// Evaluates an expression; nullopt is "undefined" (head/tail of the empty
/// sequence, or arithmetic overflow) and propagates strictly through every
/// operator.
std::optional<Value> eval(const Expr& e, const EvalEnv& env);

/// Predicate reading: undefined counts as false (a failed guard).
bool eval_predicate(const Expr& e, const EvalEnv& env);

/* -------------------------------------------------------------------------- */
/* Operation relations                                                         */
/* -------------------------------------------------------------------------- */

/// The fully enumerated transition relation of one operation: every
/// (state, input, state', output) quadruple whose states satisfy the
/// effective invariant and whose body evaluates to true. Indices refer to
/// the shared spaces.
struct OpRelation {
  std::string class_name;
  std::string op_name;
  std::shared_ptr<const StateSpace> space;
  std::shared_ptr<const BindingSpace> inputs;
  std::shared_ptr<const BindingSpace> outputs;

  struct Tuple {
    std::uint32_t s, i, s2, o;
    friend auto operator<=>(const Tuple&, const Tuple&) = default;
  };
  std::vector<Tuple> tuples;  // sorted ascending

  bool contains(const Tuple& t) const;
};

/// The (state, input) pairs with at least one transition, sorted.
std::vector<std::pair<std::uint32_t, std::uint32_t>> precondition(const OpRelation& r);

/* -------------------------------------------------------------------------- */
/* Workspace                                                                   */
/* -------------------------------------------------------------------------- */

/// Caches state spaces, binding spaces and relations for one hierarchy.
/// The hierarchy must be structurally valid and outlive the workspace.
class Workspace {
 public:
  explicit Workspace(const Hierarchy& h, std::uint64_t state_cap = kDefaultStateCap);

  const Hierarchy& hierarchy() const { return h_; }
  std::uint64_t state_cap() const { return state_cap_; }

  std::shared_ptr<const StateSpace> space(const std::string& cls);

  /// Relation of the operation as seen on `cls`: the body comes from the
  /// nearest declaration at or above `cls`, the states from `cls` itself.
  std::shared_ptr<const OpRelation> relation(const std::string& cls,
                                             const std::string& op);

  /// Identity relation over `cls`'s states with the signature of `op`:
  /// every input accepted, every output allowed, state unchanged.
  std::shared_ptr<const OpRelation> skip_relation(const std::string& cls,
                                                  const OperationSpec& op);

  std::shared_ptr<const BindingSpace> input_space(const OperationSpec& op);
  std::shared_ptr<const BindingSpace> output_space(const OperationSpec& op);

  /// States satisfying the class's init predicate (indices into space(cls)).
  const std::vector<std::uint32_t>& init_states(const std::string& cls);

  /// A raw field binding that satisfies init but violates the effective
  /// invariant, if one exists. "Checked, not assumed": init must establish
  /// the invariant.
  std::optional<Binding> init_entailment_witness(const std::string& cls);

 private:
  std::shared_ptr<const BindingSpace> params_space(const std::vector<Param>& params,
                                                   const std::string& what);

  const Hierarchy& h_;
  std::uint64_t state_cap_;
  std::map<std::string, std::shared_ptr<const StateSpace>> spaces_;
  std::map<std::pair<std::string, std::string>, std::shared_ptr<const OpRelation>> relations_;
  std::map<std::pair<std::string, std::string>, std::shared_ptr<const OpRelation>> skips_;
  std::map<std::string, std::shared_ptr<const BindingSpace>> binding_spaces_;
  std::map<std::string, std::vector<std::uint32_t>> init_states_;
};

/* -------------------------------------------------------------------------- */
/* Spec-level entry points                                                     */
/* -------------------------------------------------------------------------- */

StateSpace enumerate_states(const Hierarchy& h, const std::string& cls,
                            std::uint64_t cap = kDefaultStateCap);

OpRelation build_relation(const Hierarchy& h, const std::string& cls,
                          const std::string& op, std::uint64_t cap = kDefaultStateCap);

/// Restriction of a subclass state to the superclass's effective fields,
/// which are a prefix of the subclass's. Throws NotAnAncestor.
Binding project(const Hierarchy& h, const std::string& sub, const std::string& super,
                const Binding& s);

/// Image of a subclass relation under projection: the calculated
/// superclass operation that simulates it. Inputs and outputs carry
/// through unchanged.
OpRelation lift_relation(Workspace& ws, const OpRelation& r, const std::string& super);

}  // namespace bi
