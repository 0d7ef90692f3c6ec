#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "fpu/discretize.hpp"

namespace fpu {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put(std::ostream& os, T value) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    unsigned char b[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw std::runtime_error("load_operator: truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T value;
    std::memcpy(&value, b, sizeof(T));
    return value;
}

constexpr char kMagic[4] = {'F', 'P', 'U', 'L'};

}  // namespace

void save_operator(const std::string& path, const SymmetricOperator& op) {
    if (op.sector != Sector::full) throw std::invalid_argument("save_operator: only full operators are stored");
    const QuadratureGrid& g = *op.grid;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_operator: cannot open " + path);
    os.write(kMagic, 4);
    put<std::uint32_t>(os, 1);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(g.size));
    put<double>(os, g.grading_exponent);
    Eigen::MatrixXd m = op.full();
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) put<double>(os, m(i, j));
    for (double x : g.nodes) put<double>(os, x);
    for (double w : g.weights) put<double>(os, w);
    if (!os) throw std::runtime_error("save_operator: write failed for " + path);
}

StoredOperator load_operator(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_operator: cannot open " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("load_operator: bad magic");
    StoredOperator s;
    s.version = get<std::uint32_t>(is);
    if (s.version != 1) throw std::runtime_error("load_operator: unsupported version");
    s.n = get<std::uint32_t>(is);
    if (s.n == 0 || s.n > 65536) throw std::runtime_error("load_operator: implausible size");
    s.grading_exponent = get<double>(is);
    s.matrix.resize(s.n, s.n);
    for (std::uint32_t i = 0; i < s.n; ++i)
        for (std::uint32_t j = 0; j < s.n; ++j) s.matrix(i, j) = get<double>(is);
    s.nodes.resize(s.n);
    s.weights.resize(s.n);
    for (auto& x : s.nodes) x = get<double>(is);
    for (auto& w : s.weights) w = get<double>(is);
    return s;
}

}  // namespace fpu
