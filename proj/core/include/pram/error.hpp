#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pram {

// Failures split into two kinds because they map to distinct process exit
// codes: validation problems (bad scenario, bad rule text) exit with 2,
// runtime problems (evaluation errors, I/O) exit with 1.
class Error : public std::runtime_error {
public:
    enum class Kind { validation, runtime };

    Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const { return kind_; }

    static Error validation(const std::string& what) { return Error(Kind::validation, what); }
    static Error runtime(const std::string& what) { return Error(Kind::runtime, what); }

private:
    Kind kind_;
};

// Syntax or static-semantics failure in rule source. Positions are 1-based.
class ParseError : public Error {
public:
    ParseError(int line, int col, const std::string& what)
        : Error(Kind::validation,
                "line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + what),
          line_(line),
          col_(col) {}

    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

// Scenario validation collects every problem before failing so a bad file is
// reported in one pass.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> problems)
        : Error(Kind::validation, join(problems)), problems_(std::move(problems)) {}

    const std::vector<std::string>& problems() const { return problems_; }

private:
    static std::string join(const std::vector<std::string>& ps) {
        std::string out = "validation failed";
        for (const auto& p : ps) {
            out += "\n  - ";
            out += p;
        }
        return out;
    }

    std::vector<std::string> problems_;
};

}  // namespace pram
