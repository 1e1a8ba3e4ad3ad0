#pragma once

#include <stdexcept>
#include <string>

namespace hasse {

enum class Errc {
    budget_exhausted,
    search_exhausted,
    non_invertible,
    no_exponent,
    condition_failed,
    oracle_mismatch,
    arity_mismatch,
    degree_incompatible,
    no_certificate,
    verification_failed,
};

inline const char* errc_name(Errc e) {
    switch (e) {
        case Errc::budget_exhausted: return "budget_exhausted";
        case Errc::search_exhausted: return "search_exhausted";
        case Errc::non_invertible: return "non_invertible";
        case Errc::no_exponent: return "no_exponent";
        case Errc::condition_failed: return "condition_failed";
        case Errc::oracle_mismatch: return "oracle_mismatch";
        case Errc::arity_mismatch: return "arity_mismatch";
        case Errc::degree_incompatible: return "degree_incompatible";
        case Errc::no_certificate: return "no_certificate";
        case Errc::verification_failed: return "verification_failed";
    }
    return "unknown";
}

/// Domain failure raised by the construction and verification routines.
/// `condition()` carries the violated condition number for condition_failed.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what, int condition = 0)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what),
          code_(code),
          condition_(condition) {}

    Errc code() const noexcept { return code_; }
    int condition() const noexcept { return condition_; }

private:
    Errc code_;
    int condition_;
};

}  // namespace hasse
