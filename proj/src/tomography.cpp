#include "lgsim/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "lgsim/error.hpp"
#include "rng.hpp"

namespace lgsim {

namespace {

constexpr double kInitMixing = 1e-3;
constexpr double kArmijo = 1e-4;

Ket2 letter_ket(char c) {
    switch (c) {
    case 'H': return ket_h();
    case 'V': return ket_v();
    case 'D': return ket_a();
    case 'A': return ket_d();
    case 'R': return ket_r();
    case 'L': return ket_l();
    default: break;
    }
    throw std::invalid_argument(std::string("unknown polarization letter '") + c + "'");
}

Eigen::Matrix4cd psd_sqrt(const TwoQubitOperator& m) {
    Eigen::SelfAdjointEigenSolver<TwoQubitOperator> es(0.5 * (m + m.adjoint()));
    const Eigen::Vector4d roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

// Real inner product on complex matrices viewed as real vectors.
double dot(const TwoQubitOperator& a, const TwoQubitOperator& b) {
    return (a.array().conjugate() * b.array()).sum().real();
}

// Keeps only the 16 free parameters: strictly lower entries (complex) and the
// real part of the diagonal.
TwoQubitOperator mask_lower(const TwoQubitOperator& m) {
    TwoQubitOperator out = TwoQubitOperator::Zero();
    for (int i = 0; i < 4; ++i) {
        out(i, i) = m(i, i).real();
        for (int j = 0; j < i; ++j) out(i, j) = m(i, j);
    }
    return out;
}

class PoissonLikelihood {
  public:
    PoissonLikelihood(std::span<const TomographySetting> settings, std::span<const std::uint64_t> counts)
        : counts_(counts.begin(), counts.end()) {
        effects_.reserve(settings.size());
        for (const auto& s : settings) effects_.push_back(tensor(s.party1, s.party2));
    }

    double value(const TwoQubitOperator& t) const {
        const TwoQubitOperator x = t.adjoint() * t;
        double l = 0.0;
        for (std::size_t i = 0; i < effects_.size(); ++i) {
            const double mu = (effects_[i] * x).trace().real();
            const double n = static_cast<double>(counts_[i]);
            if (n > 0.0) {
                if (!(mu > 0.0)) return -std::numeric_limits<double>::infinity();
                l += n * std::log(mu);
            }
            l -= mu;
        }
        return l;
    }

    // Ascent direction 2 T G with G = sum_i (n_i / mu_i - 1) E_i, projected
    // onto the lower-triangular parameterization.
    TwoQubitOperator gradient(const TwoQubitOperator& t) const {
        const TwoQubitOperator x = t.adjoint() * t;
        TwoQubitOperator g = TwoQubitOperator::Zero();
        for (std::size_t i = 0; i < effects_.size(); ++i) {
            const double mu = (effects_[i] * x).trace().real();
            const double n = static_cast<double>(counts_[i]);
            const double w = (n > 0.0 ? n / mu : 0.0) - 1.0;
            g += w * effects_[i];
        }
        return mask_lower(2.0 * t * g);
    }

  private:
    std::vector<TwoQubitOperator> effects_;
    std::vector<std::uint64_t> counts_;
};

// Hermitian X minimizing sum_i (Tr[E_i X] - n_i)^2, expanded in Pauli products.
TwoQubitOperator linear_inversion(std::span<const TomographySetting> settings, std::span<const std::uint64_t> counts) {
    const std::array<QubitOperator, 4> paulis{identity2(), sigma_x(), sigma_y(), sigma_z()};
    std::array<TwoQubitOperator, 16> basis;
    for (int mu = 0; mu < 4; ++mu) {
        for (int nu = 0; nu < 4; ++nu) {
            basis[static_cast<std::size_t>(4 * mu + nu)] =
                tensor(paulis[static_cast<std::size_t>(mu)], paulis[static_cast<std::size_t>(nu)]);
        }
    }
    Eigen::MatrixXd a(static_cast<Eigen::Index>(settings.size()), 16);
    Eigen::VectorXd n(static_cast<Eigen::Index>(settings.size()));
    for (std::size_t i = 0; i < settings.size(); ++i) {
        const TwoQubitOperator e = tensor(settings[i].party1, settings[i].party2);
        for (std::size_t k = 0; k < 16; ++k) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = (e * basis[k]).trace().real();
        }
        n(static_cast<Eigen::Index>(i)) = static_cast<double>(counts[i]);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < 16) {
        throw InsufficientSettings("tomography settings do not determine all 16 state parameters");
    }
    const Eigen::VectorXd x = qr.solve(n);
    TwoQubitOperator out = TwoQubitOperator::Zero();
    for (std::size_t k = 0; k < 16; ++k) out += x(static_cast<Eigen::Index>(k)) * basis[k];
    return 0.5 * (out + out.adjoint());
}

// T lower triangular with T^dagger T = m (m positive definite).
TwoQubitOperator lower_factor(const TwoQubitOperator& m) {
    Eigen::Matrix4cd j = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < 4; ++i) j(i, 3 - i) = 1.0;
    const Eigen::LLT<Eigen::Matrix4cd> llt(j * m * j);
    if (llt.info() != Eigen::Success) {
        throw NonConvergence("initial estimate is not positive definite");
    }
    const Eigen::Matrix4cd l = llt.matrixL();
    return (j * l * j).adjoint();
}

TwoQubitState normalized(const TwoQubitOperator& t) {
    TwoQubitOperator rho = t.adjoint() * t;
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return TwoQubitState::from_matrix(rho);
}

} // namespace

TomographySetting tomography_setting(const std::string& label) {
    if (label.size() != 2) {
        throw std::invalid_argument("tomography setting label must have two letters: '" + label + "'");
    }
    return TomographySetting{label, projector(letter_ket(label[0])), projector(letter_ket(label[1]))};
}

std::vector<TomographySetting> standard_tomography_settings() {
    static const std::array<const char*, 16> labels{"HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH",
                                                    "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL"};
    std::vector<TomographySetting> out;
    out.reserve(labels.size());
    for (const char* l : labels) out.push_back(tomography_setting(l));
    return out;
}

TomographyRun mle_reconstruct(std::span<const TomographySetting> settings, std::span<const std::uint64_t> counts,
                              const TomographyOptions& options) {
    if (settings.size() != counts.size()) {
        throw std::invalid_argument("one count per tomography setting is required");
    }
    if (settings.size() < 16) {
        throw InsufficientSettings("at least 16 tomography settings are required");
    }
    const auto total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    if (total == 0) {
        throw InsufficientSettings("all tomography counts are zero");
    }

    // Starting point: clipped linear inversion mixed with I/4.
    const TwoQubitOperator x = linear_inversion(settings, counts);
    Eigen::SelfAdjointEigenSolver<TwoQubitOperator> es(x);
    const Eigen::Vector4d clipped = es.eigenvalues().cwiseMax(0.0);
    TwoQubitOperator rho0 = TwoQubitOperator::Identity() * 0.25;
    if (clipped.sum() > 0.0) {
        rho0 = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint() / clipped.sum();
    }
    rho0 = (1.0 - kInitMixing) * rho0 + kInitMixing * 0.25 * TwoQubitOperator::Identity();
    double predicted = 0.0;
    for (const auto& s : settings) predicted += (tensor(s.party1, s.party2) * rho0).trace().real();
    const double intensity = static_cast<double>(total) / predicted;

    const PoissonLikelihood likelihood(settings, counts);
    TwoQubitOperator t = lower_factor(intensity * rho0);
    double l = likelihood.value(t);
    TwoQubitOperator grad = likelihood.gradient(t);

    TomographyRun run;
    run.settings.assign(settings.begin(), settings.end());
    run.counts.assign(counts.begin(), counts.end());
    run.trace.push_back(l);

    double step = 1.0 / std::max(1.0, static_cast<double>(total));
    for (int iter = 1;; ++iter) {
        if (iter > options.max_iterations) {
            throw NonConvergence("likelihood ascent hit the iteration cap");
        }
        const double slope = dot(grad, grad);
        if (slope == 0.0) {
            run.iterations = iter - 1;
            break;
        }
        TwoQubitOperator t_next;
        double l_next = -std::numeric_limits<double>::infinity();
        double s = step;
        bool accepted = false;
        while (s > 1e-300) {
            t_next = t + s * grad;
            l_next = likelihood.value(t_next);
            if (l_next >= l + kArmijo * s * slope) {
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) {
            run.iterations = iter - 1;
            break;
        }
        const TwoQubitOperator grad_next = likelihood.gradient(t_next);
        // Barzilai-Borwein guess for the next trial step.
        const TwoQubitOperator dt = t_next - t;
        const double curvature = -dot(dt, grad_next - grad);
        step = curvature > 0.0 ? dot(dt, dt) / curvature : 2.0 * s;
        if (!std::isfinite(step) || step <= 0.0) step = 2.0 * s;

        const double gain = l_next - l;
        t = t_next;
        l = l_next;
        grad = grad_next;
        run.trace.push_back(l);
        if (gain < options.tolerance * std::max(1.0, std::abs(l))) {
            run.iterations = iter;
            break;
        }
    }

    run.result = normalized(t);
    run.log_likelihood = l;
    return run;
}

std::vector<std::uint64_t> simulate_tomography_counts(std::span<const TomographySetting> settings,
                                                      const TwoQubitState& rho, double pairs_per_setting,
                                                      std::uint64_t seed) {
    if (!std::isfinite(pairs_per_setting) || pairs_per_setting < 0.0) {
        throw std::invalid_argument("pairs_per_setting must be a nonnegative finite number");
    }
    auto rng = make_rng(seed);
    std::vector<std::uint64_t> out;
    out.reserve(settings.size());
    for (const auto& s : settings) {
        const double mean = pairs_per_setting * std::max(0.0, rho.expectation(tensor(s.party1, s.party2)));
        if (mean > 0.0) {
            std::poisson_distribution<std::uint64_t> poisson(mean);
            out.push_back(poisson(rng));
        } else {
            out.push_back(0);
        }
    }
    return out;
}

double concurrence(const TwoQubitState& rho) {
    const TwoQubitOperator yy = tensor(sigma_y(), sigma_y());
    const TwoQubitOperator flipped = yy * rho.matrix().conjugate() * yy;
    const TwoQubitOperator root = psd_sqrt(rho.matrix());
    const TwoQubitOperator r = root * flipped * root;
    Eigen::SelfAdjointEigenSolver<TwoQubitOperator> es(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);
    Eigen::Vector4d l = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    std::sort(l.data(), l.data() + 4, std::greater<>());
    return std::max(0.0, l(0) - l(1) - l(2) - l(3));
}

double purity(const TwoQubitState& rho) {
    return (rho.matrix() * rho.matrix()).trace().real();
}

double fidelity(const TwoQubitState& rho, const TwoQubitState& sigma) {
    const TwoQubitOperator root = psd_sqrt(rho.matrix());
    const TwoQubitOperator inner = root * sigma.matrix() * root;
    Eigen::SelfAdjointEigenSolver<TwoQubitOperator> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
    const double tr = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return tr * tr;
}

} // namespace lgsim
