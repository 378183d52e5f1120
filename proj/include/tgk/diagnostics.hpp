#pragma once

// Diagnostics shared by every layer of the kernel.  Hard failures throw
// Error (a stable machine-readable code plus a human message); check-style
// operations collect Diag records into a report instead, so a single run can
// list every problem in a file.

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tgk {

struct SourcePos {
    std::string file;
    int line = 0;   // 1-based; 0 means "no position"
    int col = 0;

    bool valid() const { return line > 0; }
    std::string str() const {
        if (!valid()) return file;
        return file + ":" + std::to_string(line) + ":" + std::to_string(col);
    }
};

enum class Severity { Error, Warning, Note };

struct Diag {
    std::string code;      // stable identifier, e.g. "SortMismatch"
    std::string message;
    SourcePos pos;
    Severity severity = Severity::Error;

    std::string str() const {
        std::string s;
        if (!pos.file.empty() || pos.valid()) s += pos.str() + ": ";
        switch (severity) {
            case Severity::Error: s += "error"; break;
            case Severity::Warning: s += "warning"; break;
            case Severity::Note: s += "note"; break;
        }
        s += ": [" + code + "] " + message;
        return s;
    }
};

class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, SourcePos pos = {})
        : std::runtime_error(pos.valid() || !pos.file.empty()
                                 ? pos.str() + ": [" + code + "] " + message
                                 : "[" + code + "] " + message),
          code(std::move(code)),
          pos(std::move(pos)) {}

    std::string code;
    SourcePos pos;
};

inline bool has_errors(const std::vector<Diag>& ds, size_t since) {
    for (size_t i = since; i < ds.size(); ++i)
        if (ds[i].severity == Severity::Error) return true;
    return false;
}

inline bool has_errors(const std::vector<Diag>& ds) {
    for (const auto& d : ds)
        if (d.severity == Severity::Error) return true;
    return false;
}

// Common shape for check-style results.
struct CheckReport {
    std::vector<Diag> problems;
    bool ok() const { return !has_errors(problems); }
};

}  // namespace tgk
