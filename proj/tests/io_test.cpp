#include <gtest/gtest.h>

#include <nfsm/nfsm.hpp>

#include "oracles.hpp"

using namespace nfsm;
using namespace nfsm::io;

namespace
{

const char* parity_text = R"(# parity
dfa 1
states even odd
symbols 0 1
start even
accept even
transitions
even 0 -> even
even 1 -> odd
odd 0 -> odd   # stays
odd 1 -> even
)";

std::pair<std::size_t, std::size_t> error_position( const std::string& text )
{
  try
  {
    parse_dfa( text );
  }
  catch ( const parse_error& e )
  {
    return { e.line, e.column };
  }
  return { 0, 0 };
}

std::string error_message( const std::string& text )
{
  try
  {
    parse_dfa( text );
  }
  catch ( const parse_error& e )
  {
    return e.what();
  }
  return "";
}

std::size_t count_lines_with( const std::string& text, const std::string& needle )
{
  std::size_t n = 0;
  std::istringstream in( text );
  for ( std::string line; std::getline( in, line ); )
    n += line.find( needle ) != std::string::npos;
  return n;
}

} // namespace

TEST( DfaDocument, ParsesParity )
{
  const auto doc = parse_dfa( parity_text );
  EXPECT_EQ( doc.state_names, ( std::vector<std::string>{ "even", "odd" } ) );
  EXPECT_EQ( doc.symbol_names, ( std::vector<std::string>{ "0", "1" } ) );
  EXPECT_EQ( doc.to_dfa(), make_parity_dfa() );
}

TEST( DfaDocument, RoundTrip )
{
  const auto doc = parse_dfa( parity_text );
  EXPECT_EQ( parse_dfa( write_dfa( doc ) ), doc );
  for ( std::uint64_t seed = 0; seed < 10; ++seed )
  {
    const auto d = DfaDocument::from_dfa( make_random_dfa( 1 + seed % 6, 1 + seed % 3, seed ) );
    EXPECT_EQ( parse_dfa( write_dfa( d ) ), d );
    EXPECT_EQ( write_dfa( parse_dfa( write_dfa( d ) ) ), write_dfa( d ) );
  }
}

TEST( DfaDocument, TransitionOrderDoesNotMatter )
{
  const std::string shuffled = "dfa 1\nstates a b\nsymbols x y\nstart b\naccept\ntransitions\n"
                               "b y -> a\na x -> a\nb x -> b\na y -> b\n";
  const auto dfa = parse_dfa( shuffled ).to_dfa();
  EXPECT_EQ( dfa.start_state(), 1u );
  EXPECT_TRUE( dfa.accepting_states().empty() );
  EXPECT_EQ( dfa.table(), ( std::vector<state_index>{ 0, 1, 1, 0 } ) );
}

TEST( DfaDocument, ErrorsCarryLineAndColumn )
{
  EXPECT_EQ( error_position( "" ), ( std::pair<std::size_t, std::size_t>{ 1, 1 } ) );
  EXPECT_EQ( error_position( "dfa 2\n" ), ( std::pair<std::size_t, std::size_t>{ 1, 5 } ) );
  EXPECT_EQ( error_position( "dfa 1\nstates a\nsymbols 0\nstart  b\n" ), ( std::pair<std::size_t, std::size_t>{ 4, 8 } ) );
  EXPECT_EQ( error_position( "dfa 1\nstates a a\n" ), ( std::pair<std::size_t, std::size_t>{ 2, 10 } ) );
  EXPECT_EQ( error_position( "dfa 1\nbogus\n" ), ( std::pair<std::size_t, std::size_t>{ 2, 1 } ) );
  EXPECT_EQ( error_position( "dfa 1\nstates a\nsymbols 0\nstart a\ntransitions\na 0 a\n" ),
             ( std::pair<std::size_t, std::size_t>{ 6, 1 } ) );
  EXPECT_EQ( error_position( "dfa 1\nstates a\nsymbols 0\nstart a\ntransitions\na 0 -> a\na 0 -> a\n" ),
             ( std::pair<std::size_t, std::size_t>{ 7, 1 } ) );
  EXPECT_EQ( error_position( "dfa 1\nstart a\n" ), ( std::pair<std::size_t, std::size_t>{ 2, 1 } ) );
}

TEST( DfaDocument, MissingPairIsNamed )
{
  const std::string partial = "dfa 1\nstates even odd\nsymbols 0 1\nstart even\naccept even\ntransitions\n"
                              "even 0 -> even\neven 1 -> odd\nodd 1 -> even\n";
  EXPECT_NE( error_message( partial ).find( "missing transition for (odd, 0)" ), std::string::npos );
  EXPECT_NE( error_message( "dfa 1\nstates a\nsymbols 0\ntransitions\na 0 -> a\n" ).find( "missing 'start'" ),
             std::string::npos );
}

TEST( NetworkDocument, RoundTripIsBitExact )
{
  for ( std::size_t i = 0; i < 10; ++i )
  {
    const auto c = oracle::compiled_network( i );
    const auto back = parse_network( write_network( c.net ) );
    EXPECT_TRUE( oracle::same_parameters( c.net, back ) ) << i;
  }
}

TEST( NetworkDocument, AwkwardDoublesSurvive )
{
  NetworkSpec net;
  net.input_dim = 3;
  net.output_dim = 2;
  LayerSpec l;
  l.weights.resize( 2, 3 );
  l.weights << 0.1, 1.0 / 3.0, -2.5e-300, 1e300, std::nextafter( 1.0, 2.0 ), -0.0;
  l.bias = ( Eigen::VectorXd( 2 ) << 5e-324, -123456789.123456789 ).finished();
  l.activation = Activation::step;
  l.thresholds = ( Eigen::VectorXd( 2 ) << 0.5, 2.0 / 7.0 ).finished();
  net.layers.push_back( l );
  net.metadata = { "custom", 99, 4, 12345678901234567890ull };
  const auto back = parse_network( write_network( net ) );
  EXPECT_TRUE( oracle::same_parameters( net, back ) );
  EXPECT_TRUE( std::signbit( back.layers[0].weights( 1, 2 ) ) );
}

TEST( NetworkDocument, RejectsMalformedInput )
{
  const auto text = write_network( build_transition_layer( make_parity_dfa() ) );
  EXPECT_THROW( parse_network( "" ), parse_error );
  EXPECT_THROW( parse_network( "nfsm-network 2\n" ), parse_error );
  auto truncated = text.substr( 0, text.rfind( "b " ) );
  EXPECT_THROW( parse_network( truncated ), parse_error );
  auto bad_number = text;
  bad_number.replace( bad_number.find( "w 1" ), 3, "w x" );
  try
  {
    parse_network( bad_number );
    FAIL();
  }
  catch ( const parse_error& e )
  {
    EXPECT_EQ( e.line, 7u );
    EXPECT_EQ( e.column, 3u );
  }
  auto bad_act = text;
  bad_act.replace( bad_act.find( "relu" ), 4, "tanh" );
  EXPECT_THROW( parse_network( bad_act ), parse_error );
}

TEST( Dot, ParityAndCounterShapes )
{
  const auto dot = export_dot( parse_dfa( parity_text ) );
  EXPECT_EQ( count_lines_with( dot, "shape=" ), 2u );
  EXPECT_EQ( count_lines_with( dot, "->" ), 4u );
  EXPECT_EQ( count_lines_with( dot, "doublecircle" ), 1u );
  EXPECT_EQ( dot.find( "__start" ), std::string::npos );
  EXPECT_EQ( dot, export_dot( parse_dfa( parity_text ) ) );

  const auto mod4 = export_dot( DfaDocument::from_dfa( make_mod_counter_dfa( 4 ) ) );
  EXPECT_EQ( count_lines_with( mod4, "shape=" ), 4u );
  EXPECT_EQ( count_lines_with( mod4, "->" ), 8u );
}

TEST( Csv, HeaderQuotingAndPrecision )
{
  experiments::ExperimentReport r;
  r.name = "x";
  r.configs = { "n=2,k=1" };
  r.values = { { "n=2,k=1", 3, "accuracy", 0.1 }, { "n=2,k=1", 4, "accuracy", 1.0 / 3.0 } };
  const auto csv = write_csv( r );
  EXPECT_EQ( csv, "config,seed,metric,value\n\"n=2,k=1\",3,accuracy,0.1\n\"n=2,k=1\",4,accuracy,0.3333333333333333\n" );
}

TEST( Table, RendersOneRowPerConfig )
{
  experiments::ExperimentReport r;
  r.configs = { "T=1", "T=2" };
  for ( std::uint64_t s = 0; s < 3; ++s )
  {
    r.values.push_back( { "T=1", s, "accuracy", 1.0 } );
    r.values.push_back( { "T=2", s, "accuracy", 0.5 + 0.1 * static_cast<double>( s ) } );
  }
  const auto table = render_table( r, "accuracy" );
  EXPECT_EQ( count_lines_with( table, "T=" ), 2u );
  EXPECT_NE( table.find( "1.0000  0.0000" ), std::string::npos );
  EXPECT_NE( table.find( "0.6000  0.1000" ), std::string::npos );
}
