#pragma once

#include <string>

namespace resilab {

enum class Verdict { Pass, Fail, Inconclusive, NotApplicable };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
        case Verdict::NotApplicable: return "not-applicable";
    }
    return "?";
}

/// One verdict for one check on one subject, with enough context to
/// reproduce a failure by hand.
struct CheckOutcome {
    Verdict verdict = Verdict::Fail;
    std::string check;    // check name, e.g. "lower", "wrc", "lemma4"
    std::string subject;  // the N / parameter the check ran on, as decimal
    std::string detail;   // comparison context
    bool equality = false;  // set by check_lower when both sides are equal

    bool passed() const { return verdict == Verdict::Pass; }
    bool failed() const { return verdict == Verdict::Fail; }
};

}  // namespace resilab
