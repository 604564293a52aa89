// qcore.hpp — Dense complex linear algebra for multi-subsystem pure and mixed
// states: tensor products, subsystem-targeted unitaries, projective
// measurement, partial trace/transpose, entropy and distance measures.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace icausal {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Assertion tolerance for invariant checks; identities of exactly
// representable constructions are held to the tighter value.
inline constexpr double kTol = 1e-10;
inline constexpr double kTightTol = 1e-12;

// Outcomes below this probability are reported with a null state instead of
// dividing by a near-zero norm.
inline constexpr double kNullProbability = 1e-12;

// Dense representation cap: total dimension of any state vector.
inline constexpr std::size_t kMaxStateDim = std::size_t{1} << 14;

inline double tolerance_from_env(const char* value) {
    if (value) {
        char* end = nullptr;
        const double v = std::strtod(value, &end);
        if (end != value && v > 0.0) return v;
    }
    return kTol;
}

// Assertion tolerance used by report checks. ICAUSAL_TOL overrides it
// (test-only escape hatch); read once.
inline double check_tolerance() {
    static const double tol = tolerance_from_env(std::getenv("ICAUSAL_TOL"));
    return tol;
}

// --------------------------- dimension bookkeeping ---------------------------

inline std::size_t product_dim(const std::vector<std::size_t>& dims) {
    if (dims.empty()) throw std::invalid_argument("product_dim: empty dims");
    std::size_t n = 1;
    for (std::size_t d : dims) {
        if (d < 2) throw std::invalid_argument("product_dim: every subsystem dimension must be >= 2");
        if (n > kMaxStateDim / d) throw std::invalid_argument("product_dim: state exceeds dense size cap");
        n *= d;
    }
    return n;
}

// Subsystem 0 is most significant: flat index k = sum_i idx_i * prod_{j>i} dims_j.
inline std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> s(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) s[i - 1] = s[i] * dims[i];
    return s;
}

inline void check_targets(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& targets,
                          const char* who) {
    if (targets.empty()) throw std::invalid_argument(std::string(who) + ": no target subsystems");
    std::vector<std::size_t> seen;
    for (std::size_t t : targets) {
        if (t >= dims.size()) throw std::out_of_range(std::string(who) + ": target subsystem out of range");
        if (std::find(seen.begin(), seen.end(), t) != seen.end())
            throw std::invalid_argument(std::string(who) + ": duplicate target subsystem");
        seen.push_back(t);
    }
}

namespace detail {

// Index arithmetic for acting on a subset of subsystems: flat index =
// rest_offset(r) + target_offset(t), with t running over the targeted factor
// in the order the targets were given.
struct TargetLayout {
    std::vector<std::size_t> target_dims;
    std::vector<std::size_t> target_strides;
    std::vector<std::size_t> rest_dims;
    std::vector<std::size_t> rest_strides;
    std::size_t target_space = 1;
    std::size_t rest_space = 1;

    std::size_t target_offset(std::size_t t) const {
        std::size_t off = 0;
        for (std::size_t i = target_dims.size(); i-- > 0;) {
            off += (t % target_dims[i]) * target_strides[i];
            t /= target_dims[i];
        }
        return off;
    }
    std::size_t rest_offset(std::size_t r) const {
        std::size_t off = 0;
        for (std::size_t i = rest_dims.size(); i-- > 0;) {
            off += (r % rest_dims[i]) * rest_strides[i];
            r /= rest_dims[i];
        }
        return off;
    }
};

inline TargetLayout make_layout(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& targets) {
    TargetLayout lay;
    const auto strides = strides_of(dims);
    for (std::size_t t : targets) {
        lay.target_dims.push_back(dims[t]);
        lay.target_strides.push_back(strides[t]);
        lay.target_space *= dims[t];
    }
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (std::find(targets.begin(), targets.end(), i) == targets.end()) {
            lay.rest_dims.push_back(dims[i]);
            lay.rest_strides.push_back(strides[i]);
            lay.rest_space *= dims[i];
        }
    }
    return lay;
}

}  // namespace detail

// --------------------------------- types ------------------------------------

// Normalized amplitude vector over an ordered list of subsystem dimensions.
class PureState {
public:
    PureState(std::vector<std::size_t> dims, Vector amps) : dims_(std::move(dims)), amps_(std::move(amps)) {
        const std::size_t n = product_dim(dims_);
        if (static_cast<std::size_t>(amps_.size()) != n)
            throw std::invalid_argument("PureState: amplitude count does not match dims");
        const double nrm2 = amps_.squaredNorm();
        if (std::abs(nrm2 - 1.0) > 1e-8)
            throw std::invalid_argument("PureState: amplitudes not normalized");
        amps_ /= std::sqrt(nrm2);
    }

    // Scales an arbitrary nonzero vector; the strict constructor is for inputs
    // that are already supposed to be normalized.
    static PureState normalized(std::vector<std::size_t> dims, Vector amps) {
        const double nrm = amps.norm();
        if (nrm < 1e-12) throw std::invalid_argument("PureState::normalized: zero vector");
        return PureState(std::move(dims), amps / nrm);
    }

    static PureState basis_state(std::vector<std::size_t> dims, const std::vector<std::size_t>& idx) {
        if (idx.size() != dims.size()) throw std::invalid_argument("basis_state: index count mismatch");
        const auto strides = strides_of(dims);
        std::size_t flat = 0;
        for (std::size_t i = 0; i < dims.size(); ++i) {
            if (idx[i] >= dims[i]) throw std::out_of_range("basis_state: index out of range");
            flat += idx[i] * strides[i];
        }
        Vector v = Vector::Zero(static_cast<Eigen::Index>(product_dim(dims)));
        v(static_cast<Eigen::Index>(flat)) = 1.0;
        return PureState(std::move(dims), std::move(v));
    }

    static PureState basis_state(std::size_t dim, std::size_t idx) {
        return basis_state(std::vector<std::size_t>{dim}, std::vector<std::size_t>{idx});
    }

    const std::vector<std::size_t>& dims() const { return dims_; }
    const Vector& amps() const { return amps_; }
    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
    std::size_t subsystems() const { return dims_.size(); }

private:
    std::vector<std::size_t> dims_;
    Vector amps_;
};

// Density matrix with Hermiticity, unit trace and positivity enforced.
class DensityState {
public:
    DensityState(std::vector<std::size_t> dims, Matrix mat) : dims_(std::move(dims)), mat_(std::move(mat)) {
        const std::size_t n = product_dim(dims_);
        if (mat_.rows() != static_cast<Eigen::Index>(n) || mat_.cols() != static_cast<Eigen::Index>(n))
            throw std::invalid_argument("DensityState: matrix does not match dims");
        if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > kTol)
            throw std::invalid_argument("DensityState: matrix not Hermitian");
        const double tr = mat_.trace().real();
        if (std::abs(tr - 1.0) > kTol) throw std::invalid_argument("DensityState: trace not 1");
        mat_ = ((mat_ + mat_.adjoint()) / 2.0).eval();
        mat_ /= tr;
        Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -kTol)
            throw std::invalid_argument("DensityState: negative eigenvalue");
    }

    static DensityState from_pure(const PureState& psi) {
        return DensityState(psi.dims(), psi.amps() * psi.amps().adjoint());
    }

    const std::vector<std::size_t>& dims() const { return dims_; }
    const Matrix& mat() const { return mat_; }
    std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
    std::size_t subsystems() const { return dims_.size(); }

private:
    std::vector<std::size_t> dims_;
    Matrix mat_;
};

class Unitary {
public:
    explicit Unitary(Matrix mat) : mat_(std::move(mat)) {
        if (mat_.rows() != mat_.cols() || mat_.rows() < 1)
            throw std::invalid_argument("Unitary: matrix must be square");
        const Matrix gram = mat_.adjoint() * mat_;
        if ((gram - Matrix::Identity(mat_.rows(), mat_.cols())).cwiseAbs().maxCoeff() > kTol)
            throw std::invalid_argument("Unitary: U^dag U != I");
    }

    static Unitary identity(std::size_t dim) {
        return Unitary(Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
    }

    std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
    const Matrix& mat() const { return mat_; }

private:
    Matrix mat_;
};

// Completely positive trace non-increasing map given by Kraus matrices.
class KrausChannel {
public:
    KrausChannel(std::size_t in_dim, std::size_t out_dim, std::vector<Matrix> kraus)
        : in_dim_(in_dim), out_dim_(out_dim), kraus_(std::move(kraus)) {
        if (kraus_.empty()) throw std::invalid_argument("KrausChannel: no Kraus matrices");
        for (const Matrix& k : kraus_) {
            if (k.rows() != static_cast<Eigen::Index>(out_dim_) || k.cols() != static_cast<Eigen::Index>(in_dim_))
                throw std::invalid_argument("KrausChannel: Kraus matrix shape mismatch");
        }
        Matrix s = Matrix::Zero(static_cast<Eigen::Index>(in_dim_), static_cast<Eigen::Index>(in_dim_));
        for (const Matrix& k : kraus_) s += k.adjoint() * k;
        const Matrix dev = s - Matrix::Identity(s.rows(), s.cols());
        Eigen::SelfAdjointEigenSolver<Matrix> es((dev + dev.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().maxCoeff() > kTol)
            throw std::invalid_argument("KrausChannel: sum K^dag K exceeds identity");
        trace_preserving_ = dev.cwiseAbs().maxCoeff() <= kTol;
    }

    std::size_t in_dim() const { return in_dim_; }
    std::size_t out_dim() const { return out_dim_; }
    const std::vector<Matrix>& kraus() const { return kraus_; }
    bool trace_preserving() const { return trace_preserving_; }

private:
    std::size_t in_dim_, out_dim_;
    std::vector<Matrix> kraus_;
    bool trace_preserving_;
};

// Orthonormal measurement basis; column k of vecs() is the k-th vector.
class Basis {
public:
    explicit Basis(Matrix vecs) : vecs_(std::move(vecs)) {
        if (vecs_.rows() != vecs_.cols() || vecs_.rows() < 1)
            throw std::invalid_argument("Basis: need dim orthonormal vectors of length dim");
        const Matrix gram = vecs_.adjoint() * vecs_;
        if ((gram - Matrix::Identity(vecs_.rows(), vecs_.cols())).cwiseAbs().maxCoeff() > kTol)
            throw std::invalid_argument("Basis: vectors not orthonormal");
    }

    static Basis computational(std::size_t dim) {
        return Basis(Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
    }

    std::size_t dim() const { return static_cast<std::size_t>(vecs_.rows()); }
    const Matrix& vecs() const { return vecs_; }
    Vector vec(std::size_t k) const { return vecs_.col(static_cast<Eigen::Index>(k)); }

private:
    Matrix vecs_;
};

// ----------------------------- common operators ------------------------------

inline Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline Matrix sigma_y() {
    Matrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

inline Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// ------------------------------- operations ---------------------------------

inline PureState tensor(const PureState& a, const PureState& b) {
    std::vector<std::size_t> dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    Vector amps(a.amps().size() * b.amps().size());
    for (Eigen::Index i = 0; i < a.amps().size(); ++i)
        amps.segment(i * b.amps().size(), b.amps().size()) = a.amps()(i) * b.amps();
    return PureState(std::move(dims), std::move(amps));
}

inline PureState apply_unitary(const PureState& state, const Unitary& u, const std::vector<std::size_t>& targets) {
    check_targets(state.dims(), targets, "apply_unitary");
    const auto lay = detail::make_layout(state.dims(), targets);
    if (lay.target_space != u.dim())
        throw std::invalid_argument("apply_unitary: unitary dimension does not match targeted subsystems");
    Vector out = state.amps();
    Vector x(static_cast<Eigen::Index>(lay.target_space));
    for (std::size_t r = 0; r < lay.rest_space; ++r) {
        const std::size_t base = lay.rest_offset(r);
        for (std::size_t t = 0; t < lay.target_space; ++t)
            x(static_cast<Eigen::Index>(t)) = state.amps()(static_cast<Eigen::Index>(base + lay.target_offset(t)));
        const Vector y = u.mat() * x;
        for (std::size_t t = 0; t < lay.target_space; ++t)
            out(static_cast<Eigen::Index>(base + lay.target_offset(t))) = y(static_cast<Eigen::Index>(t));
    }
    return PureState(state.dims(), std::move(out));
}

// Dense embedding of u on the targeted subsystems (identity elsewhere).
inline Matrix embed_on_targets(const Matrix& u, const std::vector<std::size_t>& targets,
                               const std::vector<std::size_t>& dims) {
    check_targets(dims, targets, "embed_on_targets");
    const auto lay = detail::make_layout(dims, targets);
    if (lay.target_space != static_cast<std::size_t>(u.rows()) || u.rows() != u.cols())
        throw std::invalid_argument("embed_on_targets: matrix dimension mismatch");
    const std::size_t n = product_dim(dims);
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < lay.rest_space; ++r) {
        const std::size_t base = lay.rest_offset(r);
        for (std::size_t ti = 0; ti < lay.target_space; ++ti)
            for (std::size_t tj = 0; tj < lay.target_space; ++tj)
                out(static_cast<Eigen::Index>(base + lay.target_offset(ti)),
                    static_cast<Eigen::Index>(base + lay.target_offset(tj))) =
                    u(static_cast<Eigen::Index>(ti), static_cast<Eigen::Index>(tj));
    }
    return out;
}

struct MeasurementOutcome {
    std::size_t outcome;
    double probability;
    std::optional<PureState> state;  // absent when probability < kNullProbability
};

inline std::vector<MeasurementOutcome> measure_exhaustive(const PureState& state, std::size_t target,
                                                          const Basis& basis) {
    if (target >= state.subsystems()) throw std::out_of_range("measure_exhaustive: target out of range");
    if (basis.dim() != state.dims()[target])
        throw std::invalid_argument("measure_exhaustive: basis dimension does not match target");
    const auto lay = detail::make_layout(state.dims(), {target});
    std::vector<MeasurementOutcome> outcomes;
    outcomes.reserve(basis.dim());
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        const Vector bk = basis.vec(k);
        Vector coeff = Vector::Zero(static_cast<Eigen::Index>(lay.rest_space));
        for (std::size_t r = 0; r < lay.rest_space; ++r) {
            const std::size_t base = lay.rest_offset(r);
            Complex acc = 0.0;
            for (std::size_t t = 0; t < lay.target_space; ++t)
                acc += std::conj(bk(static_cast<Eigen::Index>(t))) *
                       state.amps()(static_cast<Eigen::Index>(base + lay.target_offset(t)));
            coeff(static_cast<Eigen::Index>(r)) = acc;
        }
        const double p = coeff.squaredNorm();
        if (p < kNullProbability) {
            outcomes.push_back({k, p, std::nullopt});
            continue;
        }
        Vector collapsed = Vector::Zero(state.amps().size());
        for (std::size_t r = 0; r < lay.rest_space; ++r) {
            const std::size_t base = lay.rest_offset(r);
            for (std::size_t t = 0; t < lay.target_space; ++t)
                collapsed(static_cast<Eigen::Index>(base + lay.target_offset(t))) =
                    bk(static_cast<Eigen::Index>(t)) * coeff(static_cast<Eigen::Index>(r));
        }
        outcomes.push_back({k, p, PureState::normalized(state.dims(), std::move(collapsed))});
    }
    return outcomes;
}

struct SampledOutcome {
    std::size_t outcome;
    PureState state;
};

inline SampledOutcome sample_measurement(const PureState& state, std::size_t target, const Basis& basis,
                                         std::uint64_t seed) {
    const auto outcomes = measure_exhaustive(state, target, basis);
    std::mt19937_64 rng(seed);
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    const MeasurementOutcome* last = nullptr;
    for (const auto& o : outcomes) {
        if (!o.state) continue;
        last = &o;
        acc += o.probability;
        if (u < acc) break;
    }
    if (!last) throw std::logic_error("sample_measurement: no outcome with nonzero probability");
    return {last->outcome, *last->state};
}

inline DensityState partial_trace(const DensityState& rho, const std::vector<std::size_t>& keep) {
    check_targets(rho.dims(), keep, "partial_trace");
    const auto lay = detail::make_layout(rho.dims(), keep);
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(lay.target_space), static_cast<Eigen::Index>(lay.target_space));
    for (std::size_t r = 0; r < lay.rest_space; ++r) {
        const std::size_t base = lay.rest_offset(r);
        for (std::size_t i = 0; i < lay.target_space; ++i)
            for (std::size_t j = 0; j < lay.target_space; ++j)
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
                    rho.mat()(static_cast<Eigen::Index>(base + lay.target_offset(i)),
                              static_cast<Eigen::Index>(base + lay.target_offset(j)));
    }
    std::vector<std::size_t> dims;
    for (std::size_t k : keep) dims.push_back(rho.dims()[k]);
    return DensityState(std::move(dims), std::move(out));
}

inline Matrix partial_transpose(const DensityState& rho, const std::vector<std::size_t>& part) {
    check_targets(rho.dims(), part, "partial_transpose");
    const auto lay = detail::make_layout(rho.dims(), part);
    const std::size_t n = rho.dim();
    Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < lay.rest_space; ++r) {
        const std::size_t br = lay.rest_offset(r);
        for (std::size_t c = 0; c < lay.rest_space; ++c) {
            const std::size_t bc = lay.rest_offset(c);
            for (std::size_t ti = 0; ti < lay.target_space; ++ti)
                for (std::size_t tj = 0; tj < lay.target_space; ++tj)
                    out(static_cast<Eigen::Index>(br + lay.target_offset(tj)),
                        static_cast<Eigen::Index>(bc + lay.target_offset(ti))) =
                        rho.mat()(static_cast<Eigen::Index>(br + lay.target_offset(ti)),
                                  static_cast<Eigen::Index>(bc + lay.target_offset(tj)));
        }
    }
    return out;
}

// Reduced density matrix of a pure state on the given subsystems.
inline Matrix reduced_density(const PureState& psi, const std::vector<std::size_t>& part) {
    check_targets(psi.dims(), part, "reduced_density");
    const auto lay = detail::make_layout(psi.dims(), part);
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(lay.target_space), static_cast<Eigen::Index>(lay.target_space));
    for (std::size_t r = 0; r < lay.rest_space; ++r) {
        const std::size_t base = lay.rest_offset(r);
        Vector col(static_cast<Eigen::Index>(lay.target_space));
        for (std::size_t t = 0; t < lay.target_space; ++t)
            col(static_cast<Eigen::Index>(t)) = psi.amps()(static_cast<Eigen::Index>(base + lay.target_offset(t)));
        out += col * col.adjoint();
    }
    return out;
}

// Entanglement entropy in bits across part | rest.
inline double entanglement_entropy(const PureState& state, const std::vector<std::size_t>& part) {
    if (part.size() >= state.subsystems())
        throw std::invalid_argument("entanglement_entropy: part must be a strict subset");
    const Matrix rho = reduced_density(state, part);
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()(i);
        if (lam > 1e-12) s -= lam * std::log2(lam);
    }
    return s;
}

inline Complex inner_product(const PureState& a, const PureState& b) {
    if (a.dims() != b.dims()) throw std::invalid_argument("inner_product: dimension mismatch");
    return a.amps().dot(b.amps());  // Eigen's dot conjugates the left argument
}

inline double fidelity(const PureState& a, const PureState& b) {
    return std::norm(inner_product(a, b));
}

inline double trace_distance(const DensityState& r, const DensityState& s) {
    if (r.dims() != s.dims()) throw std::invalid_argument("trace_distance: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> es(r.mat() - s.mat(), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// Direct application of a trace-preserving channel to the full system.
inline DensityState apply_channel(const KrausChannel& ch, const DensityState& rho) {
    if (ch.in_dim() != rho.dim()) throw std::invalid_argument("apply_channel: dimension mismatch");
    if (!ch.trace_preserving())
        throw std::invalid_argument("apply_channel: channel must be trace preserving");
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(ch.out_dim()), static_cast<Eigen::Index>(ch.out_dim()));
    for (const Matrix& k : ch.kraus()) out += k * rho.mat() * k.adjoint();
    std::vector<std::size_t> dims =
        ch.out_dim() == ch.in_dim() ? rho.dims() : std::vector<std::size_t>{ch.out_dim()};
    return DensityState(std::move(dims), std::move(out));
}

// ------------------------- subsystem rearrangement --------------------------

// order[i] = index of the old subsystem placed at new position i.
inline PureState permute_subsystems(const PureState& state, const std::vector<std::size_t>& order) {
    if (order.size() != state.subsystems())
        throw std::invalid_argument("permute_subsystems: order must mention every subsystem once");
    check_targets(state.dims(), order, "permute_subsystems");
    std::vector<std::size_t> new_dims;
    for (std::size_t o : order) new_dims.push_back(state.dims()[o]);
    const auto old_strides = strides_of(state.dims());
    const auto new_strides = strides_of(new_dims);
    Vector out(state.amps().size());
    for (std::size_t k = 0; k < state.dim(); ++k) {
        std::size_t old_flat = 0;
        std::size_t rem = k;
        for (std::size_t i = 0; i < order.size(); ++i) {
            const std::size_t digit = rem / new_strides[i];
            rem %= new_strides[i];
            old_flat += digit * old_strides[order[i]];
        }
        out(static_cast<Eigen::Index>(k)) = state.amps()(static_cast<Eigen::Index>(old_flat));
    }
    return PureState(std::move(new_dims), std::move(out));
}

// Removes a subsystem known to be in computational basis state |idx>.
inline PureState remove_basis_factor(const PureState& state, std::size_t subsystem, std::size_t idx) {
    if (state.subsystems() < 2) throw std::invalid_argument("remove_basis_factor: need at least two subsystems");
    if (subsystem >= state.subsystems()) throw std::out_of_range("remove_basis_factor: subsystem out of range");
    if (idx >= state.dims()[subsystem]) throw std::out_of_range("remove_basis_factor: index out of range");
    const auto lay = detail::make_layout(state.dims(), {subsystem});
    Vector rest(static_cast<Eigen::Index>(lay.rest_space));
    double leak = 0.0;
    for (std::size_t r = 0; r < lay.rest_space; ++r) {
        const std::size_t base = lay.rest_offset(r);
        for (std::size_t t = 0; t < lay.target_space; ++t) {
            const Complex a = state.amps()(static_cast<Eigen::Index>(base + lay.target_offset(t)));
            if (t == idx)
                rest(static_cast<Eigen::Index>(r)) = a;
            else
                leak += std::norm(a);
        }
    }
    if (leak > kTol) throw std::invalid_argument("remove_basis_factor: subsystem not in the stated basis state");
    std::vector<std::size_t> dims;
    for (std::size_t i = 0; i < state.subsystems(); ++i)
        if (i != subsystem) dims.push_back(state.dims()[i]);
    return PureState::normalized(std::move(dims), std::move(rest));
}

// ------------------------------ random states -------------------------------

// Haar-like random pure state: Gaussian real/imaginary parts, normalized.
inline PureState random_state(const std::vector<std::size_t>& dims, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(static_cast<Eigen::Index>(product_dim(dims)));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(gauss(rng), gauss(rng));
    return PureState::normalized(dims, std::move(v));
}

inline PureState random_state(const std::vector<std::size_t>& dims, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return random_state(dims, rng);
}

// Haar-distributed random unitary via QR of a Gaussian matrix.
inline Unitary random_unitary(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const Complex d = r(j, j);
        if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
    }
    return Unitary(std::move(q));
}

}  // namespace icausal
