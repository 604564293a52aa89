// presets.hpp — Named states shipped with the artifact: the Bell quartet, the
// four-qubit bound-entangled mixture, and the default orthogonal-product
// corpus for the discrimination reduction.

#pragma once

#include <icausal/qcore.hpp>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace icausal {

// Bell states, numbered 1..4: (|00>+|11>), (|00>-|11>), (|01>+|10>), (|01>-|10>).
inline PureState bell_state(std::size_t index) {
    if (index < 1 || index > 4) throw std::invalid_argument("bell_state: index must be 1..4");
    Vector v = Vector::Zero(4);
    const double s = 1.0 / std::sqrt(2.0);
    switch (index) {
        case 1: v(0) = s; v(3) = s; break;
        case 2: v(0) = s; v(3) = -s; break;
        case 3: v(1) = s; v(2) = s; break;
        default: v(1) = s; v(2) = -s; break;
    }
    return PureState({2, 2}, std::move(v));
}

// rho_ABDE = 1/4 sum_i |B_i><B_i|_AB (x) |B_i><B_i|_DE.
inline DensityState smolin_state() {
    Matrix rho = Matrix::Zero(16, 16);
    for (std::size_t i = 1; i <= 4; ++i) {
        const Vector b = bell_state(i).amps();
        const Matrix proj = b * b.adjoint();
        rho += kron(proj, proj) / 4.0;
    }
    return DensityState({2, 2, 2, 2}, std::move(rho));
}

// Four pairwise orthogonal three-qubit product states that no party pair can
// tell apart with local measurements alone: |0,1,+>, |1,+,0>, |+,0,1>,
// |-,-,->. Orthogonality is verified at load.
inline std::vector<PureState> nlwe_default_corpus() {
    const auto ket = [](int which) {  // 0,1,+,-
        Vector v(2);
        const double s = 1.0 / std::sqrt(2.0);
        switch (which) {
            case 0: v << 1, 0; break;
            case 1: v << 0, 1; break;
            case 2: v << s, s; break;
            default: v << s, -s; break;
        }
        return PureState({2}, v);
    };
    const std::vector<std::array<int, 3>> spec{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {3, 3, 3}};
    std::vector<PureState> corpus;
    for (const auto& factors : spec)
        corpus.push_back(tensor(tensor(ket(factors[0]), ket(factors[1])), ket(factors[2])));
    for (std::size_t i = 0; i < corpus.size(); ++i)
        for (std::size_t j = i + 1; j < corpus.size(); ++j)
            if (std::abs(inner_product(corpus[i], corpus[j])) > kTol)
                throw std::logic_error("nlwe_default_corpus: states not orthogonal");
    return corpus;
}

}  // namespace icausal
