#ifndef BELIEFSCOPE_ERROR_HPP
#define BELIEFSCOPE_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace beliefscope {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error(what), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// A well-formed model that breaks one or more structural or numerical
/// invariants. Carries every violation found, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> diagnostics)
        : Error(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

private:
    static std::string join(const std::vector<std::string>& lines) {
        std::string out;
        for (const auto& l : lines) {
            if (!out.empty()) out += "; ";
            out += l;
        }
        return out;
    }

    std::vector<std::string> diagnostics_;
};

/// Evidence naming an unknown node or a state outside the node's state list.
class EvidenceError : public Error {
public:
    using Error::Error;
};

/// Evidence with zero probability under the model.
class ImpossibleEvidence : public Error {
public:
    ImpossibleEvidence(std::string node, std::optional<long long> frame = std::nullopt)
        : Error(describe(node, frame)), node_(std::move(node)), frame_(frame) {}

    const std::string& node() const noexcept { return node_; }
    std::optional<long long> frame() const noexcept { return frame_; }

private:
    static std::string describe(const std::string& node, std::optional<long long> frame) {
        std::string s;
        if (frame) s = "frame " + std::to_string(*frame) + ": ";
        return s + "impossible evidence: support vanished at node '" + node + "'";
    }

    std::string node_;
    std::optional<long long> frame_;
};

class CapExceeded : public Error {
public:
    using Error::Error;
};

/// Caller broke an operation precondition (bad region, mismatched
/// dimensions, too-short window, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

class UnknownName : public Error {
public:
    using Error::Error;
};

} // namespace beliefscope

#endif // BELIEFSCOPE_ERROR_HPP
