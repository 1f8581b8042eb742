#include "dossim/plant.hpp"

#include <algorithm>
#include <cmath>

#include "dossim/errors.hpp"
#include "dossim/tolerances.hpp"

namespace dossim {

int PlantModel::state_dim() const {
    int n = 0;
    for (const auto& s : subsystems) n += s.state_dim();
    return n;
}

int PlantModel::offset(int id) const {
    int off = 0;
    for (const auto& s : subsystems) {
        if (s.id == id) return off;
        off += s.state_dim();
    }
    throw DimensionMismatch("unknown subsystem id " + std::to_string(id));
}

const Subsystem& PlantModel::subsystem(int id) const {
    for (const auto& s : subsystems)
        if (s.id == id) return s;
    throw DimensionMismatch("unknown subsystem id " + std::to_string(id));
}

const std::set<int>& PlantModel::neighbors_of(int id) const {
    static const std::set<int> kEmpty;
    const auto it = neighbors.find(id);
    return it == neighbors.end() ? kEmpty : it->second;
}

std::span<const double> PlantModel::state_of(std::span<const double> stacked, int id) const {
    return stacked.subspan(offset(id), subsystem(id).state_dim());
}

PlantModel PlantModel::with_inferred_neighbors(std::vector<Subsystem> subsystems) {
    PlantModel model;
    model.subsystems = std::move(subsystems);
    for (const auto& s : model.subsystems) {
        auto& nbrs = model.neighbors[s.id];
        for (const auto& [j, m] : s.coupling_physical) nbrs.insert(j);
        for (const auto& [j, m] : s.coupling_control) nbrs.insert(j);
    }
    // symmetrize
    for (const auto& s : model.subsystems)
        for (int j : model.neighbors[s.id]) model.neighbors[j].insert(s.id);
    return model;
}

std::vector<Violation> validate(const PlantModel& model) {
    std::vector<Violation> out;
    const int n = model.count();

    // ids dense 1..N, in order
    for (int i = 0; i < n; ++i) {
        if (model.subsystems[i].id != i + 1) {
            out.push_back({"DenseIds", {model.subsystems[i].id},
                           "subsystem ids must be 1..N in order"});
            return out;  // everything else keys off ids
        }
    }

    for (const auto& s : model.subsystems) {
        const int ns = s.a.rows();
        if (!s.a.is_square() || ns == 0)
            out.push_back({"BadDimensions", {s.id}, "A must be square and nonempty"});
        else {
            if (s.b.rows() != ns)
                out.push_back({"BadDimensions", {s.id}, "B row count must match A"});
            if (s.k.rows() != s.b.cols() || s.k.cols() != ns)
                out.push_back({"BadDimensions", {s.id}, "K must be m x n"});
            if (s.q.rows() != ns || s.q.cols() != ns)
                out.push_back({"BadDimensions", {s.id}, "Q must be n x n"});
        }
        if (!s.a.all_finite() || !s.b.all_finite() || !s.k.all_finite() || !s.q.all_finite())
            out.push_back({"NonFinite", {s.id}, "matrix entries must be finite"});
    }
    if (!out.empty()) return out;

    for (const auto& s : model.subsystems) {
        if (!s.q.is_symmetric(tol::kSymmetry))
            out.push_back({"QNotSymmetric", {s.id}, "Q must be symmetric"});
        else if (symmetric_eigenvalues(s.q).front() <= 0.0)
            out.push_back({"QNotPositiveDefinite", {s.id}, "Q must be positive definite"});
        if (!is_hurwitz(s.closed_loop()))
            out.push_back({"NotHurwitz", {s.id}, "A + B K must be Hurwitz"});
    }

    // neighbor relation: symmetric, known ids, couplings keyed on neighbors
    for (const auto& [i, nbrs] : model.neighbors) {
        if (i < 1 || i > n) {
            out.push_back({"UnknownId", {i}, "neighbor map references unknown subsystem"});
            continue;
        }
        for (int j : nbrs) {
            if (j < 1 || j > n || j == i) {
                out.push_back({"UnknownId", {i, j}, "invalid neighbor id"});
                continue;
            }
            const auto it = model.neighbors.find(j);
            if (it == model.neighbors.end() || !it->second.contains(i))
                out.push_back({"AsymmetricNeighbors", {i, j},
                               "j in N_i requires i in N_j"});
        }
    }
    for (const auto& s : model.subsystems) {
        const auto& nbrs = model.neighbors_of(s.id);
        for (const auto& [j, h] : s.coupling_physical) {
            if (!nbrs.contains(j)) {
                out.push_back({"CouplingOutsideNeighbors", {s.id, j},
                               "physical coupling key not in neighbor set"});
                continue;
            }
            const auto& other = model.subsystem(j);
            if (h.rows() != s.state_dim() || h.cols() != other.state_dim())
                out.push_back({"BadDimensions", {s.id, j}, "H_ij must be n_i x n_j"});
        }
        for (const auto& [j, l] : s.coupling_control) {
            if (!nbrs.contains(j)) {
                out.push_back({"CouplingOutsideNeighbors", {s.id, j},
                               "control coupling key not in neighbor set"});
                continue;
            }
            const auto& other = model.subsystem(j);
            if (l.rows() != s.input_dim() || l.cols() != other.state_dim())
                out.push_back({"BadDimensions", {s.id, j}, "L_ij must be m_i x n_j"});
        }
    }
    return out;
}

void validate_or_throw(const PlantModel& model) {
    const auto violations = validate(model);
    if (violations.empty()) return;
    std::string msg = "invalid plant model:";
    for (const auto& v : violations) {
        msg += " [" + v.rule;
        for (int id : v.subsystems) msg += " " + std::to_string(id);
        msg += ": " + v.detail + "]";
    }
    throw ConfigError(msg);
}

HeldState HeldState::from_state(const PlantModel& model, std::span<const double> x, double t) {
    if (static_cast<int>(x.size()) != model.state_dim())
        throw DimensionMismatch("state size does not match model");
    HeldState h;
    h.sample.reserve(model.subsystems.size());
    for (const auto& s : model.subsystems) {
        const auto xs = model.state_of(x, s.id);
        h.sample.emplace_back(xs.begin(), xs.end());
        h.last_success.push_back(t);
    }
    return h;
}

void HeldState::update(const PlantModel& model, int id, std::span<const double> x, double t) {
    const auto xs = model.state_of(x, id);
    auto& slot = sample[id - 1];
    slot.assign(xs.begin(), xs.end());
    if (t < last_success[id - 1])
        throw BadRange("held-state timestamps must be nondecreasing");
    last_success[id - 1] = t;
}

std::vector<double> HeldState::stacked() const {
    std::vector<double> out;
    for (const auto& s : sample) out.insert(out.end(), s.begin(), s.end());
    return out;
}

void closed_loop_derivative_into(const PlantModel& model, std::span<const double> x,
                                 const HeldState& held, std::span<double> out) {
    const int dim = model.state_dim();
    if (static_cast<int>(x.size()) != dim || static_cast<int>(out.size()) != dim)
        throw DimensionMismatch("state size does not match model");
    if (held.sample.size() != model.subsystems.size())
        throw DimensionMismatch("held-state size does not match model");

    int off = 0;
    for (const auto& s : model.subsystems) {
        const int ns = s.state_dim();
        const auto xi = x.subspan(off, ns);
        // u_i = K_i held_i + sum L_ij held_j
        std::vector<double> u = s.k.apply(held.sample[s.id - 1]);
        for (const auto& [j, l] : s.coupling_control) {
            const auto lu = l.apply(held.sample[j - 1]);
            for (size_t r = 0; r < u.size(); ++r) u[r] += lu[r];
        }
        // x_i' = A_i x_i + B_i u_i + sum H_ij x_j
        auto dx = s.a.apply(xi);
        const auto bu = s.b.apply(u);
        for (int r = 0; r < ns; ++r) dx[r] += bu[r];
        for (const auto& [j, h] : s.coupling_physical) {
            const auto hx = h.apply(model.state_of(x, j));
            for (int r = 0; r < ns; ++r) dx[r] += hx[r];
        }
        std::copy(dx.begin(), dx.end(), out.begin() + off);
        off += ns;
    }
}

std::vector<double> closed_loop_derivative(const PlantModel& model, std::span<const double> x,
                                           const HeldState& held) {
    std::vector<double> out(model.state_dim(), 0.0);
    closed_loop_derivative_into(model, x, held, out);
    return out;
}

std::vector<std::vector<double>> error_vector(const PlantModel& model, std::span<const double> x,
                                              const HeldState& held) {
    if (static_cast<int>(x.size()) != model.state_dim())
        throw DimensionMismatch("state size does not match model");
    if (held.sample.size() != model.subsystems.size())
        throw DimensionMismatch("held-state size does not match model");
    std::vector<std::vector<double>> errors;
    errors.reserve(model.subsystems.size());
    for (const auto& s : model.subsystems) {
        const auto xi = model.state_of(x, s.id);
        const auto& hi = held.sample[s.id - 1];
        if (hi.size() != xi.size()) throw DimensionMismatch("held sample size mismatch");
        std::vector<double> e(xi.size());
        for (size_t r = 0; r < e.size(); ++r) e[r] = hi[r] - xi[r];
        errors.push_back(std::move(e));
    }
    return errors;
}

}  // namespace dossim
