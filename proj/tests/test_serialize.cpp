#include "testutil.hpp"
int main() { return test_summary("test_serialize"); }
