#pragma once

// Dense complex linear algebra for small unitaries (dim <= 2^10), plus
// permutations, Haar sampling and a matrix-exponential oracle used for
// verification. Everything here is a plain value type; share freely.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace srbb {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

class CMat {
public:
    CMat() = default;
    explicit CMat(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim) {
        if (dim < 1) throw std::invalid_argument("CMat: dim must be >= 1");
    }

    static CMat identity(int dim) {
        CMat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    int dim() const { return dim_; }

    cplx& operator()(int r, int c) { return a_[static_cast<size_t>(r) * dim_ + c]; }
    const cplx& operator()(int r, int c) const { return a_[static_cast<size_t>(r) * dim_ + c]; }

    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

    CMat adjoint() const {
        CMat m(dim_);
        for (int r = 0; r < dim_; ++r)
            for (int c = 0; c < dim_; ++c) m(c, r) = std::conj((*this)(r, c));
        return m;
    }

    cplx trace() const {
        cplx t = 0.0;
        for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    CMat operator*(const CMat& rhs) const {
        if (dim_ != rhs.dim_) throw std::invalid_argument("CMat: dimension mismatch in product");
        CMat out(dim_);
        for (int r = 0; r < dim_; ++r) {
            for (int k = 0; k < dim_; ++k) {
                const cplx v = (*this)(r, k);
                if (v == cplx{}) continue;
                for (int c = 0; c < dim_; ++c) out(r, c) += v * rhs(k, c);
            }
        }
        return out;
    }

    CMat operator*(cplx s) const {
        CMat out = *this;
        for (auto& v : out.a_) v *= s;
        return out;
    }

    CMat operator+(const CMat& rhs) const {
        if (dim_ != rhs.dim_) throw std::invalid_argument("CMat: dimension mismatch in sum");
        CMat out = *this;
        for (size_t i = 0; i < a_.size(); ++i) out.a_[i] += rhs.a_[i];
        return out;
    }

    CMat operator-(const CMat& rhs) const {
        if (dim_ != rhs.dim_) throw std::invalid_argument("CMat: dimension mismatch in difference");
        CMat out = *this;
        for (size_t i = 0; i < a_.size(); ++i) out.a_[i] -= rhs.a_[i];
        return out;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    // Determinant by LU with partial pivoting.  Fine for the target dims.
    cplx determinant() const {
        std::vector<cplx> m = a_;
        const int d = dim_;
        cplx det = 1.0;
        for (int k = 0; k < d; ++k) {
            int piv = k;
            double best = std::abs(m[static_cast<size_t>(k) * d + k]);
            for (int r = k + 1; r < d; ++r) {
                const double mag = std::abs(m[static_cast<size_t>(r) * d + k]);
                if (mag > best) { best = mag; piv = r; }
            }
            if (best == 0.0) return 0.0;
            if (piv != k) {
                for (int c = 0; c < d; ++c)
                    std::swap(m[static_cast<size_t>(piv) * d + c], m[static_cast<size_t>(k) * d + c]);
                det = -det;
            }
            const cplx pivot = m[static_cast<size_t>(k) * d + k];
            det *= pivot;
            for (int r = k + 1; r < d; ++r) {
                const cplx f = m[static_cast<size_t>(r) * d + k] / pivot;
                if (f == cplx{}) continue;
                for (int c = k; c < d; ++c)
                    m[static_cast<size_t>(r) * d + c] -= f * m[static_cast<size_t>(k) * d + c];
            }
        }
        return det;
    }

private:
    int dim_ = 0;
    std::vector<cplx> a_;
};

inline double frobenius_distance(const CMat& a, const CMat& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("frobenius_distance: dimension mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.data().size(); ++i) s += std::norm(a.data()[i] - b.data()[i]);
    return std::sqrt(s);
}

inline bool is_unitary(const CMat& a, double tol) {
    return frobenius_distance(a.adjoint() * a, CMat::identity(a.dim())) <= tol;
}

// exp(i*h) by scaling-and-squaring around a Taylor core.  Deliberately
// independent of the structural exponentials it is used to verify.
inline CMat expm_oracle(const CMat& h) {
    const int d = h.dim();
    CMat a(d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a(r, c) = cplx(0.0, 1.0) * h(r, c);

    double norm1 = 0.0;
    for (int c = 0; c < d; ++c) {
        double col = 0.0;
        for (int r = 0; r < d; ++r) col += std::abs(a(r, c));
        norm1 = std::max(norm1, col);
    }
    int squarings = 0;
    while (norm1 > 0.5) { norm1 /= 2.0; ++squarings; }
    const double scale = std::ldexp(1.0, -squarings);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a(r, c) *= scale;

    CMat result = CMat::identity(d);
    CMat term = CMat::identity(d);
    for (int k = 1; k <= 40; ++k) {
        term = term * a;
        for (auto& v : term.data()) v /= static_cast<double>(k);
        result = result + term;
        if (term.frobenius_norm() < 1e-20) break;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

// --- permutations (1-based, matching the coordinate-pair conventions) ---

class Permutation {
public:
    explicit Permutation(int dim) : image_(dim) {
        if (dim < 1) throw std::invalid_argument("Permutation: dim must be >= 1");
        for (int i = 1; i <= dim; ++i) image_[i - 1] = i;
    }

    static Permutation transposition(int dim, int a, int b) {
        Permutation p(dim);
        if (a < 1 || b < 1 || a > dim || b > dim)
            throw std::invalid_argument("Permutation: transposition out of range");
        std::swap(p.image_[a - 1], p.image_[b - 1]);
        return p;
    }

    int dim() const { return static_cast<int>(image_.size()); }
    int operator()(int i) const { return image_[i - 1]; }

    void swap_points(int a, int b) { std::swap(image_[a - 1], image_[b - 1]); }

    Permutation compose(const Permutation& rhs) const {  // (*this) after rhs
        if (dim() != rhs.dim()) throw std::invalid_argument("Permutation: dimension mismatch");
        Permutation out(dim());
        for (int i = 1; i <= dim(); ++i) out.image_[i - 1] = (*this)(rhs(i));
        return out;
    }

    int non_fixed_points() const {
        int c = 0;
        for (int i = 1; i <= dim(); ++i)
            if ((*this)(i) != i) ++c;
        return c;
    }

    bool is_identity() const { return non_fixed_points() == 0; }

    bool is_involution() const {
        for (int i = 1; i <= dim(); ++i)
            if ((*this)((*this)(i)) != i) return false;
        return true;
    }

private:
    std::vector<int> image_;
};

inline CMat permutation_to_matrix(const Permutation& p) {
    CMat m(p.dim());
    for (int j = 1; j <= p.dim(); ++j) m(p(j) - 1, j - 1) = 1.0;
    return m;
}

// --- Haar sampling: QR of a complex Ginibre matrix, R-diagonal phase fix ---

inline CMat haar_random_unitary(int dim, std::uint64_t seed, bool special = false) {
    if (dim < 1) throw std::invalid_argument("haar_random_unitary: dim must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Ginibre columns, orthonormalized by modified Gram-Schmidt (QR).
    std::vector<std::vector<cplx>> col(dim, std::vector<cplx>(dim));
    for (int c = 0; c < dim; ++c)
        for (int r = 0; r < dim; ++r) col[c][r] = cplx(gauss(rng), gauss(rng));

    CMat q(dim);
    for (int c = 0; c < dim; ++c) {
        for (int k = 0; k < c; ++k) {
            cplx proj = 0.0;
            for (int r = 0; r < dim; ++r) proj += std::conj(q(r, k)) * col[c][r];
            for (int r = 0; r < dim; ++r) col[c][r] -= proj * q(r, k);
        }
        // r_cc phase normalization: make the R diagonal real positive.
        double nrm = 0.0;
        for (int r = 0; r < dim; ++r) nrm += std::norm(col[c][r]);
        nrm = std::sqrt(nrm);
        for (int r = 0; r < dim; ++r) q(r, c) = col[c][r] / nrm;
    }
    if (special) {
        const cplx det = q.determinant();
        const cplx phase = std::exp(cplx(0.0, -std::arg(det) / dim));
        for (auto& v : q.data()) v *= phase;
    }
    return q;
}

// --- matrix file format ---
//
//   # optional comments
//   n 2            (or: dim 4)
//   re a11 a12 ... (dim^2 numbers, row-major, single line)
//   im b11 b12 ...
//
// Doubles are written as hexfloats so files round-trip bit-exactly.

inline void write_matrix(std::ostream& os, const CMat& m) {
    const int d = m.dim();
    int n = 0;
    while ((1 << n) < d) ++n;
    if ((1 << n) == d) os << "n " << n << "\n";
    os << "dim " << d << "\n";
    char buf[64];
    os << "re";
    for (const auto& v : m.data()) { std::snprintf(buf, sizeof buf, " %a", v.real()); os << buf; }
    os << "\nim";
    for (const auto& v : m.data()) { std::snprintf(buf, sizeof buf, " %a", v.imag()); os << buf; }
    os << "\n";
}

inline CMat read_matrix(std::istream& is) {
    int dim = -1;
    std::vector<double> re, im;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "n") {
            int n = 0;
            if (!(ls >> n) || n < 0) throw std::runtime_error("matrix file: bad qubit count");
            if (dim < 0) dim = 1 << n;
        } else if (key == "dim") {
            if (!(ls >> dim) || dim < 1) throw std::runtime_error("matrix file: bad dim");
        } else if (key == "re" || key == "im") {
            auto& dst = (key == "re") ? re : im;
            std::string tok;
            while (ls >> tok) {  // strtod accepts hexfloat tokens; iostreams do not
                char* end = nullptr;
                const double v = std::strtod(tok.c_str(), &end);
                if (end == tok.c_str() || *end != '\0')
                    throw std::runtime_error("matrix file: bad number '" + tok + "'");
                dst.push_back(v);
            }
        } else {
            throw std::runtime_error("matrix file: unknown field '" + key + "'");
        }
    }
    if (dim < 1) throw std::runtime_error("matrix file: missing dim/n field");
    const size_t want = static_cast<size_t>(dim) * dim;
    if (re.size() != want || im.size() != want)
        throw std::runtime_error("matrix file: entry count does not match dim^2");
    CMat m(dim);
    for (size_t i = 0; i < want; ++i) m.data()[i] = cplx(re[i], im[i]);
    return m;
}

inline CMat read_matrix_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open matrix file: " + path);
    return read_matrix(f);
}

inline void write_matrix_file(const std::string& path, const CMat& m) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write matrix file: " + path);
    write_matrix(f, m);
}

}  // namespace srbb
