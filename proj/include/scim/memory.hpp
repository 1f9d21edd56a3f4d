#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "scim/place.hpp"
#include "scim/type_system.hpp"

namespace scim {

using Json = nlohmann::ordered_json;

struct Unbound {
  bool operator==(const Unbound&) const = default;
};
struct InstanceRef {
  std::uint32_t id = 0;
  auto operator<=>(const InstanceRef&) const = default;
};
using Filler = std::variant<Unbound, Atom, InstanceRef>;

bool filler_equal(const Filler& a, const Filler& b);
std::string filler_to_string(const Filler& f);

struct Instance {
  std::uint32_t id = 0;
  std::string type;
  std::map<std::string, Filler> fillers;  // slot key -> value
  double capacity = 1.0;                  // > 0
  double trust = 1.0;                     // in (0, 1]
  std::vector<std::uint32_t> parents;     // derivation parents, acyclic
  std::uint64_t created_at = 0;
};

struct SituationEntry {
  std::uint32_t instance = 0;
  Place place;
  bool present = true;
  std::uint64_t placed_at = 0;
  std::optional<std::uint64_t> removed_at;
};

struct MutationRecord {
  std::uint64_t clock = 0;
  std::uint32_t instance = 0;
  std::string slot;
  Filler old_value;
  Filler new_value;
};

struct CreationRecord {
  std::uint64_t clock = 0;
  std::uint32_t instance = 0;
  std::string type;
  std::map<std::string, Filler> fillers;
  std::vector<std::uint32_t> parents;
  double capacity = 1.0;
  double trust = 1.0;
};

struct FiringRecord {
  std::string construction;
  std::map<std::string, std::uint32_t> binding;  // constituent -> instance
  std::uint64_t clock = 0;
  std::vector<std::uint32_t> created;
};

struct DeadDecision {
  std::uint64_t clock = 0;
  std::string construction;
  std::map<std::string, std::uint32_t> binding;
  std::string reason;
};

struct RefractoryEntry {
  std::string construction;
  std::vector<std::uint32_t> inputs;  // sorted bound input ids
  std::uint64_t clock = 0;            // firing (or dead-decision) time
};

// One alternative-interpretation world. Forking copies the whole state;
// children and parents share nothing mutable.
class BranchState {
 public:
  explicit BranchState(const TypeHierarchy* hierarchy, int branch_id = 0);

  int branch_id() const { return branch_id_; }
  std::optional<int> parent_branch() const { return parent_branch_; }
  std::uint64_t clock() const { return clock_; }
  const TypeHierarchy& hierarchy() const { return *hierarchy_; }

  const std::map<std::uint32_t, Instance>& instances() const {
    return instances_;
  }
  bool has_instance(std::uint32_t id) const { return instances_.count(id) > 0; }
  const Instance& instance(std::uint32_t id) const;  // UnknownInstance

  // Creates an instance of a schema or context type. Unspecified roles
  // stay unbound; constant filler constraints of the type are applied as
  // initial fillers. capacity/trust default to 1.0 unless given.
  std::uint32_t create_instance(const std::string& type,
                                const std::map<std::string, Filler>& fillers,
                                const std::vector<std::uint32_t>& parents,
                                std::optional<double> capacity = {},
                                std::optional<double> trust = {});

  void situate(std::uint32_t inst, std::uint32_t ctx, const Place& place);
  void remove_situated(std::uint32_t inst, std::uint32_t ctx);
  bool is_present(std::uint32_t inst, std::uint32_t ctx) const;
  std::optional<Place> place_of(std::uint32_t inst, std::uint32_t ctx) const;
  // present entries of a context instance, instance-id order
  std::vector<const SituationEntry*> present_in(std::uint32_t ctx) const;
  const std::map<std::uint32_t, std::vector<SituationEntry>>& situations()
      const {
    return situations_;
  }
  // true iff the instance was situated somewhere and is now present
  // nowhere (an OUT-consumed instance)
  bool removed_everywhere(std::uint32_t inst) const;

  // Changes a role declared mutable. Records old/new in the mutation log.
  void mutate_role(std::uint32_t inst, const std::string& slot,
                   const Filler& value);
  // First binding of an unbound role: allowed regardless of mutability
  // ("specify some previously underspecified role's value"); still logged.
  void specify_role(std::uint32_t inst, const std::string& slot,
                    const Filler& value);

  Filler read_slot(std::uint32_t inst, const std::string& slot) const;

  // Relations/operations declared on a context type, dispatched to the
  // native implementations.
  RelationValue eval_relation(const std::string& ctx_type,
                              const std::string& name,
                              const std::vector<Place>& places) const;
  Place eval_operation(const std::string& ctx_type, const std::string& name,
                       const std::vector<Place>& places) const;

  BranchState fork(int child_id) const;

  const std::vector<MutationRecord>& mutation_log() const {
    return mutation_log_;
  }
  const std::vector<CreationRecord>& creation_log() const {
    return creation_log_;
  }
  std::vector<FiringRecord>& firing_log() { return firing_log_; }
  const std::vector<FiringRecord>& firing_log() const { return firing_log_; }
  std::vector<DeadDecision>& dead_decisions() { return dead_decisions_; }
  const std::vector<DeadDecision>& dead_decisions() const {
    return dead_decisions_;
  }
  std::vector<RefractoryEntry>& refractory() { return refractory_; }
  const std::vector<RefractoryEntry>& refractory() const {
    return refractory_;
  }
  std::uint64_t last_mutation_clock(std::uint32_t inst) const;

  double score() const { return score_; }
  void set_score(double s) { score_ = s; }

  std::uint64_t tick() { return ++clock_; }

  // Structured dump with stable key order; the golden-test and trace
  // format. `include_dead` controls the dead-decision section.
  Json dump(bool include_dead = true) const;

  // Rebuilds the live state from the creation/situation/mutation logs.
  BranchState replay() const;

 private:
  const TypeHierarchy* hierarchy_;
  int branch_id_ = 0;
  std::optional<int> parent_branch_;
  std::uint64_t clock_ = 0;
  std::uint32_t next_id_ = 1;
  std::map<std::uint32_t, Instance> instances_;
  std::map<std::uint32_t, std::vector<SituationEntry>> situations_;
  std::vector<MutationRecord> mutation_log_;
  std::vector<CreationRecord> creation_log_;
  std::vector<FiringRecord> firing_log_;
  std::vector<DeadDecision> dead_decisions_;
  std::vector<RefractoryEntry> refractory_;
  double score_ = 0.0;

  void check_filler_type(const std::string& type, const std::string& slot,
                         const Filler& value) const;
  void check_parent_acyclic(const std::vector<std::uint32_t>& parents,
                            std::uint32_t self) const;
};

Json place_to_json(const Place& p);
Json filler_to_json(const Filler& f);

}  // namespace scim
