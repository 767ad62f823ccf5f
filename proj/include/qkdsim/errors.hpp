#ifndef QKDSIM_ERRORS_HPP
#define QKDSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qkdsim {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct IndexError : Error {
    explicit IndexError(const std::string& msg) : Error(msg) {}
};

struct NormalizationError : Error {
    explicit NormalizationError(const std::string& msg) : Error(msg) {}
};

struct UnitarityError : Error {
    explicit UnitarityError(const std::string& msg) : Error(msg) {}
};

struct CausalityMaskError : Error {
    explicit CausalityMaskError(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

struct InterlaceError : Error {
    explicit InterlaceError(const std::string& msg) : Error(msg) {}
};

struct ProtocolError : Error {
    explicit ProtocolError(const std::string& msg) : Error(msg) {}
};

struct UnsupportedError : Error {
    explicit UnsupportedError(const std::string& msg) : Error(msg) {}
};

}  // namespace qkdsim

#endif
