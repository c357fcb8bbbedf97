#pragma once

#include <stdexcept>
#include <string>

namespace gck {

// Base for every error this library throws on bad input or an
// infeasible request.  Internal logic bugs use assert instead.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define GCK_DEFINE_ERROR(Name)                                            \
    struct Name : Error {                                                 \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

GCK_DEFINE_ERROR(NonConformable);       // matrix shape mismatch
GCK_DEFINE_ERROR(NotSquare);
GCK_DEFINE_ERROR(NotUnimodular);
GCK_DEFINE_ERROR(TooLarge);             // instance exceeds a documented size cap
GCK_DEFINE_ERROR(NotHereditarySaturated);
GCK_DEFINE_ERROR(NotOneIdeal);          // subset does not induce a usable ideal
GCK_DEFINE_ERROR(QuotientNotUnital);
GCK_DEFINE_ERROR(NotPrimitive);
GCK_DEFINE_ERROR(NotStationary);
GCK_DEFINE_ERROR(NoStabilization);      // staged computation did not settle by the depth cap
GCK_DEFINE_ERROR(UnsupportedCertificate);
GCK_DEFINE_ERROR(HypothesesNotMet);     // input outside a checker's stated preconditions
GCK_DEFINE_ERROR(NoDominance);          // gluing needs a strictly dominating row pair
GCK_DEFINE_ERROR(UnsolvableZ);          // gluing correction has no integer solution
GCK_DEFINE_ERROR(BadBasePoint);         // scale base point fails its level-one precondition
GCK_DEFINE_ERROR(Infeasible);           // no object with the requested invariant exists
GCK_DEFINE_ERROR(ConstructionFailed);   // synthesis step could not complete
GCK_DEFINE_ERROR(VerificationFailed);   // round-trip check after a construction failed
GCK_DEFINE_ERROR(InconsistentData);     // input data contradicts itself
GCK_DEFINE_ERROR(ParseError);

#undef GCK_DEFINE_ERROR

} // namespace gck
