// Compiles the parity automaton into an unrolled acceptor, checks it on every
// string of length 6, and prints the network document.
#include <iostream>

#include <nfsm/nfsm.hpp>

int main()
{
  const auto dfa = nfsm::make_parity_dfa();
  const auto net = nfsm::build_unrolled_acceptor( dfa, 6 );
  const auto report = nfsm::verify_exact( net, dfa, 6 );

  std::cout << "# depth " << net.depth() << ", " << net.parameter_count() << " parameters, "
            << report.total_strings - report.mismatch_count << "/" << report.total_strings
            << ( report.exact ? " exact" : " mismatched" ) << '\n';
  std::cout << nfsm::io::write_network( net );
  return report.exact ? 0 : 1;
}
