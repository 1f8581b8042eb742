#pragma once

// Shared fixtures: the two worked interconnections used across the suites.

#include "dossim/certificate.hpp"
#include "dossim/plant.hpp"

namespace testing_models {

inline dossim::PlantModel example1() {
    using dossim::Matrix;
    dossim::Subsystem s1;
    s1.id = 1;
    s1.a = Matrix{{1.0}};
    s1.b = Matrix{{1.0}};
    s1.k = Matrix{{-4.5}};
    s1.q = Matrix{{1.0}};
    s1.coupling_physical[2] = Matrix{{1.0}};
    s1.coupling_control[2] = Matrix{{-1.4}};

    dossim::Subsystem s2;
    s2.id = 2;
    s2.a = Matrix{{1.0}};
    s2.b = Matrix{{1.0}};
    s2.k = Matrix{{-6.0}};
    s2.q = Matrix{{1.0}};
    s2.coupling_control[1] = Matrix{{-1.0}};

    dossim::PlantModel model;
    model.subsystems = {s1, s2};
    model.neighbors = {{1, {2}}, {2, {1}}};
    return model;
}

/// The a_diag pin that reproduces the published comparison diagonal.
inline dossim::CertificateOptions example1_options() {
    dossim::CertificateOptions opt;
    opt.delta = 0.1;
    opt.mu = std::vector<double>{1.0, 1.0};
    opt.sigma = std::vector<double>{0.2, 0.2};
    opt.overrides.alpha = std::vector<double>{0.7, 0.9};
    return opt;
}

inline dossim::PlantModel example2() {
    using dossim::Matrix;
    const Matrix b{{0.0}, {0.25}};
    const Matrix q = Matrix::identity(2);
    const Matrix spring{{0.0, 0.0}, {1.25, 0.0}};

    dossim::Subsystem s1;
    s1.id = 1;
    s1.a = Matrix{{0.0, 1.0}, {-3.75, 0.0}};
    s1.b = b;
    s1.k = Matrix{{-23.0, -12.0}};
    s1.q = q;
    s1.coupling_physical[2] = spring;
    s1.coupling_control[2] = Matrix{{-5.0, 0.25}};

    dossim::Subsystem s2;
    s2.id = 2;
    s2.a = Matrix{{0.0, 1.0}, {-2.5, 0.0}};
    s2.b = b;
    s2.k = Matrix{{-18.0, -12.0}};
    s2.q = q;
    s2.coupling_physical[1] = spring;
    s2.coupling_physical[3] = spring;
    s2.coupling_control[1] = Matrix{{-4.75, -0.25}};
    s2.coupling_control[3] = Matrix{{-4.75, -0.25}};

    dossim::Subsystem s3 = s1;
    s3.id = 3;

    dossim::PlantModel model;
    model.subsystems = {s1, s2, s3};
    model.neighbors = {{1, {2}}, {2, {1, 3}}, {3, {2}}};
    return model;
}

/// Published comparison couplings for the pendulum line.
inline dossim::CertificateOptions example2_options() {
    using dossim::Matrix;
    dossim::CertificateOptions opt;
    opt.delta = 0.11;
    opt.sigma = std::vector<double>{0.01, 0.01, 0.01};
    opt.overrides.beta =
        Matrix{{0.0, 0.0608, 0.0}, {0.1217, 0.0, 0.1217}, {0.0, 0.0608, 0.0}};
    opt.overrides.gamma = Matrix{{47.7983, 24.4007, 0.0},
                                 {22.0276, 33.2386, 22.0276},
                                 {0.0, 24.4007, 47.7983}};
    return opt;
}

}  // namespace testing_models
