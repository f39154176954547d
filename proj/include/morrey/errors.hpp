#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace morrey {

enum class ErrorKind {
    NonPositiveDeterminant,
    Degenerate,
    Domain,
    Syntax,
    UnknownIdentifier,
    WrongVariable,
    InfimumUnreliable,
    NegativeRadicand,
    OutOfDomain,
    QuadratureDivergence,
    NotMonotone,
    ZeroMatrix,
    Overlap,
    Nesting,
    LeftGLPlus,
    InvalidArgument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, const std::string& what)
        : Error(ErrorKind::Syntax, what + " at offset " + std::to_string(offset)),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class IdentifierError : public Error {
public:
    IdentifierError(ErrorKind kind, std::string name, std::size_t offset)
        : Error(kind, (kind == ErrorKind::WrongVariable ? "wrong variable '"
                                                         : "unknown identifier '")
                          + name + "' at offset " + std::to_string(offset)),
          name_(std::move(name)),
          offset_(offset) {}

    const std::string& name() const noexcept { return name_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::string name_;
    std::size_t offset_;
};

inline const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::NonPositiveDeterminant: return "NonPositiveDeterminant";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::WrongVariable: return "WrongVariable";
    case ErrorKind::InfimumUnreliable: return "InfimumUnreliable";
    case ErrorKind::NegativeRadicand: return "NegativeRadicand";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::QuadratureDivergence: return "QuadratureDivergence";
    case ErrorKind::NotMonotone: return "NotMonotone";
    case ErrorKind::ZeroMatrix: return "ZeroMatrix";
    case ErrorKind::Overlap: return "OverlapError";
    case ErrorKind::Nesting: return "NestingError";
    case ErrorKind::LeftGLPlus: return "LeftGLplus";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Error";
}

} // namespace morrey
