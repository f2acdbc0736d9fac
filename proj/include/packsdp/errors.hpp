#pragma once

#include <stdexcept>
#include <string>

namespace packsdp {

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

    // prefix the message with a pipeline stage name
    Error staged(const std::string& stage) const { return Error(kind_, stage + ": " + detail()); }
    std::string detail() const {
        std::string w = what();
        return w.substr(kind_.size() + 2);
    }

private:
    std::string kind_;
};

#define PACKSDP_ERROR(Name)                                                   \
    struct Name : Error {                                                     \
        explicit Name(const std::string& w = "") : Error(#Name, w) {}         \
    }

PACKSDP_ERROR(FieldMismatch);
PACKSDP_ERROR(ParseError);
PACKSDP_ERROR(Inconsistent);
PACKSDP_ERROR(ZeroPolynomial);
PACKSDP_ERROR(EndpointIsRoot);
PACKSDP_ERROR(NotSymmetric);
PACKSDP_ERROR(ThresholdAmbiguous);
PACKSDP_ERROR(DependentRows);
PACKSDP_ERROR(NotFound);
PACKSDP_ERROR(InsufficientRelations);
PACKSDP_ERROR(LossyField);
PACKSDP_ERROR(Infeasible);
PACKSDP_ERROR(PrecisionExhausted);
PACKSDP_ERROR(DegreeTooSmall);
PACKSDP_ERROR(CaseUnsupported);
PACKSDP_ERROR(RootIsolationFailed);
PACKSDP_ERROR(Underdetermined);
PACKSDP_ERROR(NoNonnegativeSolution);

#undef PACKSDP_ERROR

} // namespace packsdp
