#pragma once

#include <string>

namespace tmark::testing {

// "The company said employees will lose their jobs after the sale is completed."
inline const std::string kWorkedExampleTree =
    "(S1 (S (NP (DT The) (NN company))"
    "     (VP (VBD said)"
    "       (S (NP (NNS employees))"
    "         (VP (MD will)"
    "          (VP (VB lose)"
    "           (NP (PRP their) (NNS jobs))"
    "           (SBAR-TMP (IN after)"
    "            (S (NP (DT the) (NN sale))"
    "             (VP (AUX is) (VP (VBN completed)))"
    "  ))))))))";

// Sentence-initial subordinate clause.
inline const std::string kSubFirstTree =
    "(S1 (S (SBAR-TMP (IN Before) (S (NP (NNS prices)) (VP (VBD rose))))"
    " (, ,) (NP (NNS investors)) (VP (VBD sold) (NP (NNS shares))) (. .)))";

}  // namespace tmark::testing
