#ifndef EBUS_UTIL_HPP
#define EBUS_UTIL_HPP

#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace ebus {

struct ParameterError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverEnvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// printf-style formatting; locale-independent, used for all generated text so
// outputs stay byte-stable across runs.
inline std::string strfmt(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    char buf[512];
    int n = std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    if (n < 0) return {};
    if (static_cast<size_t>(n) < sizeof(buf)) return std::string(buf, n);
    std::string big(static_cast<size_t>(n) + 1, '\0');
    va_start(args, fmt);
    std::vsnprintf(big.data(), big.size(), fmt, args);
    va_end(args);
    big.resize(static_cast<size_t>(n));
    return big;
}

// Shortest decimal form that round-trips a double (for CSV/JSON emission).
inline std::string format_double(double v) {
    for (int prec = 1; prec <= 17; ++prec) {
        std::string s = strfmt("%.*g", prec, v);
        if (std::strtod(s.c_str(), nullptr) == v) return s;
    }
    return strfmt("%.17g", v);
}

// FNV-1a, used for instance hashes in run manifests.
inline uint64_t fnv1a(const std::string& data, uint64_t seed = 0xcbf29ce484222325ULL) {
    uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string minute_to_hhmm(int minute) {
    return strfmt("%02d:%02d", minute / 60, minute % 60);
}

}  // namespace ebus

#endif
