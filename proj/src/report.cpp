#include "skm/report.hpp"

#include <algorithm>
#include <sstream>

namespace skm {

bool ValidationReport::passed() const {
    return std::none_of(findings.begin(), findings.end(),
                        [](const Finding& f) { return f.severity == Severity::error; });
}

void ValidationReport::add(std::string code, Severity severity, std::string message,
                           std::vector<std::string> subjects) {
    findings.push_back({std::move(code), severity, std::move(message), std::move(subjects)});
}

void ValidationReport::merge(const ValidationReport& other) {
    findings.insert(findings.end(), other.findings.begin(), other.findings.end());
}

std::vector<Finding> ValidationReport::errors() const {
    std::vector<Finding> out;
    std::copy_if(findings.begin(), findings.end(), std::back_inserter(out),
                 [](const Finding& f) { return f.severity == Severity::error; });
    return out;
}

const char* to_string(Severity s) {
    switch (s) {
        case Severity::info: return "info";
        case Severity::warning: return "warning";
        case Severity::error: return "error";
    }
    return "error";
}

Json to_json(const ValidationReport& report) {
    Json findings = Json::array();
    for (const auto& f : report.findings) {
        findings.push_back({{"code", f.code},
                            {"severity", to_string(f.severity)},
                            {"message", f.message},
                            {"subjects", f.subjects}});
    }
    return {{"passed", report.passed()}, {"findings", findings}};
}

std::string to_text(const ValidationReport& report) {
    std::ostringstream out;
    out << (report.passed() ? "PASSED" : "FAILED") << " (" << report.findings.size()
        << " finding" << (report.findings.size() == 1 ? "" : "s") << ")\n";
    for (const auto& f : report.findings) {
        out << "  [" << to_string(f.severity) << "] " << f.code << ": " << f.message;
        if (!f.subjects.empty()) {
            out << " {";
            for (std::size_t i = 0; i < f.subjects.size(); ++i) out << (i ? ", " : "") << f.subjects[i];
            out << "}";
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace skm
