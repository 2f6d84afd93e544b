// The state type: one complex amplitude per vertex, plus snapshot I/O.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace dnls {

using Complex = std::complex<double>;

/// The wavefunction f: one complex amplitude per vertex.
using ComplexField = std::vector<Complex>;

inline bool all_finite(const ComplexField& f) {
    for (const auto& z : f)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

/// Text snapshot: first line `n`, then 2n reals, one `re im` pair per line.
inline void save_field_text(const ComplexField& f, std::ostream& out) {
    out.precision(17);
    out << f.size() << "\n";
    for (const auto& z : f) out << z.real() << " " << z.imag() << "\n";
}

inline ComplexField load_field_text(std::istream& in) {
    std::size_t n = 0;
    if (!(in >> n)) throw std::invalid_argument("field snapshot: missing size");
    ComplexField f(n);
    for (std::size_t i = 0; i < n; ++i) {
        double re, im;
        if (!(in >> re >> im)) throw std::invalid_argument("field snapshot: truncated data");
        f[i] = {re, im};
    }
    return f;
}

/// Binary snapshot: uint64 n, then 2n little-endian IEEE-754 doubles
/// (interleaved real/imaginary). This code assumes a little-endian host.
inline void save_field_binary(const ComplexField& f, std::ostream& out) {
    std::uint64_t n = f.size();
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(f.data()),
              std::streamsize(n * sizeof(Complex)));
}

inline ComplexField load_field_binary(std::istream& in) {
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    if (!in) throw std::invalid_argument("field snapshot: missing size");
    ComplexField f(n);
    in.read(reinterpret_cast<char*>(f.data()), std::streamsize(n * sizeof(Complex)));
    if (!in) throw std::invalid_argument("field snapshot: truncated data");
    return f;
}

}  // namespace dnls
