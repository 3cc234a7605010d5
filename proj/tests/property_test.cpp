#include <gtest/gtest.h>

#include <nfsm/nfsm.hpp>

#include "oracles.hpp"

using namespace nfsm;

TEST( Property, GradientsMatchFiniteDifferences )
{
  for ( std::uint64_t seed = 0; seed < 100; ++seed )
  {
    const auto c = oracle::gradient_case( 1000 + seed );
    EXPECT_LT( c.relative_error, 1e-4 ) << c.description << " case " << seed;
  }
}

TEST( Property, HopcroftAgreesWithTableFilling )
{
  std::mt19937_64 rng( 31337 );
  for ( int i = 0; i < 50; ++i )
  {
    const auto n = std::uniform_int_distribution<std::size_t>( 1, 10 )( rng );
    const auto k = std::uniform_int_distribution<std::size_t>( 1, 3 )( rng );
    const auto dfa = make_random_dfa( n, k, rng() );
    const auto check = oracle::check_minimization( dfa, minimize( dfa ), 8 );
    EXPECT_TRUE( check.state_count_ok ) << "case " << i;
    EXPECT_TRUE( check.language_ok ) << "case " << i;
    EXPECT_TRUE( check.partition_ok ) << "case " << i;
  }
}

TEST( Property, MinimizationIsIdempotent )
{
  for ( std::uint64_t seed = 0; seed < 30; ++seed )
  {
    const auto m = minimize( make_random_dfa( 8, 2, seed ) );
    EXPECT_EQ( minimize( m ), m );
  }
}

TEST( Property, CompressedProjectionSeparatesStates )
{
  for ( std::size_t n = 2; n <= 64; ++n )
    for ( std::uint64_t seed = 0; seed < 3; ++seed )
    {
      const auto e = build_compressed_embedding( make_mod_counter_dfa( n ), 0.1, seed * 977 + n );
      EXPECT_EQ( static_cast<std::size_t>( e.projection.rows() ), oracle::ceil_log2( n ) + 1 );
      double closest = std::numeric_limits<double>::infinity();
      for ( Eigen::Index a = 0; a < e.projection.cols(); ++a )
        for ( Eigen::Index b = 0; b < a; ++b )
          closest = std::min( closest, std::sqrt( ( e.projection.col( a ) - e.projection.col( b ) ).array().square().sum() ) );
      EXPECT_GT( closest, 0.1 ) << "n=" << n;
    }
}

TEST( Property, SerializationRoundTrip )
{
  for ( std::size_t i = 0; i < 20; ++i )
  {
    const auto c = oracle::compiled_network( i );
    const auto back = io::parse_network( io::write_network( c.net ) );
    EXPECT_TRUE( oracle::same_parameters( c.net, back ) ) << "network " << i;
    EXPECT_TRUE( oracle::evaluate_identically( c.net, back, c.dfa.alphabet_size(), c.length ) ) << "network " << i;
  }
}

TEST( Property, TransitionLayerExactForRandomDfas )
{
  for ( std::size_t n = 1; n <= 32; ++n )
    for ( std::size_t k = 1; k <= 3; ++k )
    {
      const auto dfa = make_random_dfa( n, k, n * 7 + k );
      const auto net = build_transition_layer( dfa );
      EXPECT_EQ( net.widths().front(), n * k );
      EXPECT_TRUE( verify_transition_layer( net, dfa ).exact() ) << "n=" << n << " k=" << k;
    }
}

TEST( Property, BinaryCircuitExactForRandomDfas )
{
  for ( std::size_t n = 1; n <= 32; ++n )
    for ( std::size_t k = 1; k <= 3; ++k )
    {
      const auto dfa = make_random_dfa( n, k, n * 11 + k );
      const auto net = build_binary_threshold_network( dfa );
      for ( state_index i = 0; i < n; ++i )
        for ( symbol_index j = 0; j < k; ++j )
        {
          Eigen::VectorXd in( static_cast<Eigen::Index>( binary_width( n ) + k ) );
          in << binary_code( i, binary_width( n ) ), one_hot( j, k );
          EXPECT_EQ( decode_binary( forward( net, in ) ), dfa.table()[i * k + j] ) << "n=" << n << " k=" << k;
        }
    }
}

TEST( Property, UnrolledAcceptorExactForRandomDfas )
{
  for ( std::uint64_t seed = 0; seed < 25; ++seed )
  {
    const auto n = 1 + seed % 7;
    const auto k = 1 + seed % 3;
    const auto dfa = make_random_dfa( n, k, seed );
    for ( std::size_t t = 0; t <= 6; ++t )
    {
      const auto net = build_unrolled_acceptor( dfa, t );
      std::size_t wrong = 0;
      for_each_string( k, t, [&]( const SymbolString& x ) {
        const bool want = dfa.is_accepting( oracle::table_run( dfa.table(), k, dfa.start_state(), x ) );
        wrong += ( forward( net, encode_string( x, k ).data )[0] == 1.0 ) != want;
      } );
      EXPECT_EQ( wrong, 0u ) << "seed " << seed << " T=" << t;
    }
  }
}

TEST( Property, EmbeddingsAreNerodeClassesOfMinimalDfas )
{
  for ( std::uint64_t seed = 0; seed < 15; ++seed )
  {
    const auto dfa = minimize( make_random_dfa( 6, 2, seed ) );
    const auto net = build_embedding_head( dfa, 5 );
    std::vector<SymbolString> strings;
    for_each_string( 2, 5, [&]( const SymbolString& x ) { strings.push_back( x ); } );
    const auto classes = nerode_classes( dfa, strings );
    for ( std::size_t a = 0; a < strings.size(); a += 3 )
      for ( std::size_t b = a + 1; b < strings.size(); b += 5 )
      {
        const bool same_embedding = forward( net, encode_string( strings[a], 2 ).data ) ==
                                    forward( net, encode_string( strings[b], 2 ).data );
        EXPECT_EQ( same_embedding, classes.class_of[a] == classes.class_of[b] );
      }
  }
}
