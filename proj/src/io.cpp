#include "randdiv/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "randdiv/assembly.hpp"
#include "randdiv/error.hpp"
#include "randdiv/spectral.hpp"

namespace randdiv {

std::string sha256_hex(std::span<const unsigned char> bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error(ErrorKind::data_error, "sha256 failed");
    }
    EVP_MD_CTX_free(ctx);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out(2 * len, '0');
    for (unsigned i = 0; i < len; ++i) {
        out[2 * i] = hex[digest[i] >> 4];
        out[2 * i + 1] = hex[digest[i] & 0xf];
    }
    return out;
}

std::string sha256_hex(std::string_view text) {
    return sha256_hex(
        std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::parse_error, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::data_error, "cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string field_to_csv(const CoefficientField& field) {
    const int d = field.grid.dim;
    std::string out;
    for (int k = 0; k < d; ++k) out += "x" + std::to_string(k + 1) + ",";
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) out += "a" + std::to_string(r + 1) + std::to_string(c + 1) + ",";
    out += "V\n";
    for (std::size_t i = 0; i < field.lattice_size(); ++i) {
        const Point x = field.lattice_point(field.lattice_multi(i));
        for (int k = 0; k < d; ++k) out += format_double(x[k]) + ",";
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) out += format_double(field.A[i][3 * r + c]) + ",";
        out += format_double(field.V[i]) + "\n";
    }
    return out;
}

namespace {

constexpr char kMagic[5] = {'R', 'D', 'I', 'V', '1'};

template <class T>
void put_le(std::vector<unsigned char>& out, T value) {
    std::uint64_t bits;
    if constexpr (sizeof(T) == 8) bits = std::bit_cast<std::uint64_t>(value);
    else bits = static_cast<std::uint64_t>(std::bit_cast<std::uint32_t>(value));
    for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<unsigned char>(bits >> (8 * b)));
}

template <class T>
T get_le(std::span<const unsigned char> in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size())
        throw Error(ErrorKind::parse_error, "truncated RDIV1 table");
    std::uint64_t bits = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b)
        bits |= static_cast<std::uint64_t>(in[pos + b]) << (8 * b);
    pos += sizeof(T);
    if constexpr (sizeof(T) == 8) return std::bit_cast<T>(bits);
    else return std::bit_cast<T>(static_cast<std::uint32_t>(bits));
}

}  // namespace

std::vector<unsigned char> field_to_binary(const CoefficientField& field) {
    const int d = field.grid.dim;
    std::vector<unsigned char> out(kMagic, kMagic + 5);
    put_le(out, static_cast<std::uint32_t>(d));
    put_le(out, field.grid.L);
    put_le(out, field.grid.h);
    put_le(out, field.theta_E);
    put_le(out, field.theta_L);
    put_le(out, static_cast<std::uint64_t>(field.lattice_size()));
    for (std::size_t i = 0; i < field.lattice_size(); ++i) {
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) put_le(out, field.A[i][3 * r + c]);
        put_le(out, field.V[i]);
    }
    return out;
}

CoefficientField field_from_binary(std::span<const unsigned char> bytes) {
    if (bytes.size() < 5 || std::memcmp(bytes.data(), kMagic, 5) != 0)
        throw Error(ErrorKind::parse_error, "missing RDIV1 magic");
    std::size_t pos = 5;
    const auto d = static_cast<int>(get_le<std::uint32_t>(bytes, pos));
    const double L = get_le<double>(bytes, pos);
    const double h = get_le<double>(bytes, pos);
    CoefficientField f;
    f.grid = Grid(d, L, h);
    f.theta_E = get_le<double>(bytes, pos);
    f.theta_L = get_le<double>(bytes, pos);
    const auto count = get_le<std::uint64_t>(bytes, pos);
    if (count != f.lattice_size())
        throw Error(ErrorKind::parse_error, "RDIV1 point count does not match its grid");
    f.A.assign(count, Matrix3{});
    f.V.assign(count, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) f.A[i][3 * r + c] = get_le<double>(bytes, pos);
        f.V[i] = get_le<double>(bytes, pos);
    }
    if (pos != bytes.size()) throw Error(ErrorKind::parse_error, "trailing bytes in RDIV1 table");
    return f;
}

std::string spectrum_to_csv(const SpectrumSlice& slice) {
    std::string out = "index,eigenvalue,residual\n";
    for (std::size_t i = 0; i < slice.eigenvalues.size(); ++i)
        out += std::to_string(i + 1) + "," + format_double(slice.eigenvalues[i]) + "," +
               format_double(slice.residual_norms[i]) + "\n";
    return out;
}

}  // namespace randdiv
