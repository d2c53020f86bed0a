#pragma once

#include <string>
#include <vector>

#include "skm/json.hpp"

namespace skm {

enum class Severity { info, warning, error };

struct Finding {
    std::string code;
    Severity severity = Severity::error;
    std::string message;
    std::vector<std::string> subjects;  // offending reaction / species ids

    friend bool operator==(const Finding&, const Finding&) = default;
};

struct ValidationReport {
    std::vector<Finding> findings;

    bool passed() const;
    void add(std::string code, Severity severity, std::string message,
             std::vector<std::string> subjects = {});
    void merge(const ValidationReport& other);
    std::vector<Finding> errors() const;
};

const char* to_string(Severity s);
Json to_json(const ValidationReport& report);
std::string to_text(const ValidationReport& report);

}  // namespace skm
