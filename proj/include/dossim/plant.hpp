#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dossim/matrix.hpp"

namespace dossim {

/**
 * One subsystem of the interconnected plant: local dynamics x' = A x + B u,
 * state feedback K, Lyapunov weight Q, and per-neighbor coupling gains.
 * coupling_physical holds the plant-side couplings (into the dynamics),
 * coupling_control the controller-side ones (into the input).
 */
struct Subsystem {
    int id = 0;
    Matrix a;  // n x n
    Matrix b;  // n x m
    Matrix k;  // m x n
    Matrix q;  // n x n, symmetric positive definite
    std::map<int, Matrix> coupling_physical;  // neighbor id -> n_i x n_j
    std::map<int, Matrix> coupling_control;   // neighbor id -> m_i x n_j

    int state_dim() const { return a.rows(); }
    int input_dim() const { return b.cols(); }

    /// A + B K.
    Matrix closed_loop() const { return a + b * k; }
};

/// The interconnected plant: subsystems with ids 1..N and a symmetric
/// neighbor relation. Immutable once validated.
struct PlantModel {
    std::vector<Subsystem> subsystems;
    std::map<int, std::set<int>> neighbors;

    int count() const { return static_cast<int>(subsystems.size()); }
    int state_dim() const;
    /// Offset of subsystem `id` in the stacked state vector.
    int offset(int id) const;
    const Subsystem& subsystem(int id) const;
    const std::set<int>& neighbors_of(int id) const;

    std::span<const double> state_of(std::span<const double> stacked, int id) const;

    /// Builds the neighbor relation from nonzero couplings (j is a neighbor
    /// of i when H_ij or L_ij is present), symmetrized.
    static PlantModel with_inferred_neighbors(std::vector<Subsystem> subsystems);
};

struct Violation {
    std::string rule;
    std::vector<int> subsystems;
    std::string detail;
};

/// Checks every structural invariant; returns one entry per violation
/// (empty means the model is valid). Violations are data, not exceptions.
std::vector<Violation> validate(const PlantModel& model);

/// Throws ConfigError with the first violation message if any.
void validate_or_throw(const PlantModel& model);

/// Last successfully transmitted state per subsystem, sample-and-hold.
struct HeldState {
    std::vector<std::vector<double>> sample;
    std::vector<double> last_success;

    static HeldState from_state(const PlantModel& model, std::span<const double> x, double t);
    void update(const PlantModel& model, int id, std::span<const double> x, double t);
    /// Held samples flattened in subsystem order.
    std::vector<double> stacked() const;
};

/// Stacked state derivative with inputs computed from the held samples.
std::vector<double> closed_loop_derivative(const PlantModel& model, std::span<const double> x,
                                           const HeldState& held);

/// Same, writing into a caller-provided buffer (no allocation).
void closed_loop_derivative_into(const PlantModel& model, std::span<const double> x,
                                 const HeldState& held, std::span<double> out);

/// Per-subsystem e_i = held_i - x_i.
std::vector<std::vector<double>> error_vector(const PlantModel& model, std::span<const double> x,
                                              const HeldState& held);

}  // namespace dossim
