#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace
{

struct Result
{
  int status;
  std::string out;
};

/// Runs the CLI with stderr folded into stdout.
Result run( const std::string& args )
{
  const std::string cmd = std::string( NFSM_CLI ) + " " + args + " 2>&1";
  FILE* pipe = popen( cmd.c_str(), "r" );
  if ( !pipe )
    return { -1, "" };
  std::string out;
  std::array<char, 4096> buf;
  while ( auto n = fread( buf.data(), 1, buf.size(), pipe ) )
    out.append( buf.data(), n );
  const int raw = pclose( pipe );
  return { WIFEXITED( raw ) ? WEXITSTATUS( raw ) : -1, out };
}

std::string sample( const std::string& name ) { return std::string( NFSM_SAMPLES ) + "/" + name; }

class Cli : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = std::filesystem::temp_directory_path() /
           ( "nfsm_cli_" + std::string( ::testing::UnitTest::GetInstance()->current_test_info()->name() ) );
    std::filesystem::create_directories( dir_ );
  }
  void TearDown() override { std::filesystem::remove_all( dir_ ); }

  std::string path( const std::string& name ) const { return ( dir_ / name ).string(); }

  std::string write( const std::string& name, const std::string& text ) const
  {
    std::ofstream( path( name ) ) << text;
    return path( name );
  }

  std::string read( const std::string& name ) const
  {
    std::ifstream in( path( name ) );
    return { std::istreambuf_iterator<char>( in ), {} };
  }

  std::filesystem::path dir_;
};

std::size_t count( const std::string& text, const std::string& needle )
{
  std::size_t n = 0;
  for ( auto at = text.find( needle ); at != std::string::npos; at = text.find( needle, at + 1 ) )
    ++n;
  return n;
}

} // namespace

TEST_F( Cli, CompileUnrolledReportsDepth )
{
  const auto r = run( "compile " + sample( "parity.dfa" ) + " -t unrolled -T 4 -o " + path( "p.net" ) );
  EXPECT_EQ( r.status, 0 ) << r.out;
  EXPECT_NE( r.out.find( "depth 5" ), std::string::npos ) << r.out;
  EXPECT_EQ( count( read( "p.net" ), "layer " ), 5u );
}

TEST_F( Cli, CompileTransitionHasHiddenWidthNk )
{
  const auto r = run( "compile " + sample( "parity.dfa" ) + " -t transition -o " + path( "t.net" ) );
  EXPECT_EQ( r.status, 0 ) << r.out;
  EXPECT_NE( r.out.find( "widths [4, 2]" ), std::string::npos ) << r.out;
}

TEST_F( Cli, CompileNeedsLengthAndValidTarget )
{
  EXPECT_EQ( run( "compile " + sample( "parity.dfa" ) + " -t unrolled" ).status, 2 );
  EXPECT_EQ( run( "compile " + sample( "parity.dfa" ) + " -t fancy" ).status, 2 );
  EXPECT_EQ( run( "compile " + path( "missing.dfa" ) + " -t transition" ).status, 2 );
}

TEST_F( Cli, MalformedDfaGivesLineAndColumn )
{
  const auto bad = write( "bad.dfa", "dfa 1\nstates a b\nsymbols 0\nstart a\naccept zz\n" );
  const auto r = run( "compile " + bad + " -t transition" );
  EXPECT_EQ( r.status, 2 );
  EXPECT_NE( r.out.find( ":5:8:" ), std::string::npos ) << r.out;
}

TEST_F( Cli, VerifyParityExhaustively )
{
  ASSERT_EQ( run( "compile " + sample( "parity.dfa" ) + " -t unrolled -T 7 -o " + path( "p7.net" ) ).status, 0 );
  const auto r = run( "verify " + path( "p7.net" ) + " " + sample( "parity.dfa" ) );
  EXPECT_EQ( r.status, 0 );
  EXPECT_NE( r.out.find( "128/128 exact" ), std::string::npos ) << r.out;
  EXPECT_EQ( run( "verify " + path( "p7.net" ) + " " + sample( "parity.dfa" ) + " -j 3" ).out, r.out );
}

TEST_F( Cli, CorruptedNetworkGivesWitness )
{
  ASSERT_EQ( run( "compile " + sample( "parity.dfa" ) + " -t unrolled -T 3 -o " + path( "p3.net" ) ).status, 0 );
  auto text = read( "p3.net" );
  const auto readout = text.rfind( "\nb " );
  text.replace( readout, 4, "\nb 1" );
  write( "bad.net", text );
  const auto r = run( "verify " + path( "bad.net" ) + " " + sample( "parity.dfa" ) );
  EXPECT_EQ( r.status, 1 ) << r.out;
  EXPECT_NE( r.out.find( "first witness: 001" ), std::string::npos ) << r.out;
}

TEST_F( Cli, BudgetRefusalAndSampling )
{
  ASSERT_EQ( run( "compile " + sample( "parity.dfa" ) + " -t unrolled -T 30 -o " + path( "p30.net" ) ).status, 0 );
  const auto refused = run( "verify " + path( "p30.net" ) + " " + sample( "parity.dfa" ) );
  EXPECT_EQ( refused.status, 2 );
  EXPECT_NE( refused.out.find( "budget" ), std::string::npos ) << refused.out;
  const auto sampled = run( "verify " + path( "p30.net" ) + " " + sample( "parity.dfa" ) + " --sampled 300" );
  EXPECT_EQ( sampled.status, 0 ) << sampled.out;
  EXPECT_NE( sampled.out.find( "300/300" ), std::string::npos );
}

TEST_F( Cli, VerifyDimensionMismatch )
{
  ASSERT_EQ( run( "compile " + sample( "parity.dfa" ) + " -t unrolled -T 3 -o " + path( "p3.net" ) ).status, 0 );
  EXPECT_EQ( run( "verify " + path( "p3.net" ) + " " + sample( "parity.dfa" ) + " -T 4" ).status, 2 );
}

TEST_F( Cli, VerifyOtherTargets )
{
  for ( std::string target : { "transition", "binary", "embedding", "compressed" } )
  {
    ASSERT_EQ( run( "compile " + sample( "mod4.dfa" ) + " -t " + target + " -T 5 -o " + path( "m.net" ) ).status, 0 );
    const auto r = run( "verify " + path( "m.net" ) + " " + sample( "mod4.dfa" ) );
    EXPECT_EQ( r.status, 0 ) << target << ": " << r.out;
    EXPECT_NE( r.out.find( " exact" ), std::string::npos ) << target;
  }
}

TEST_F( Cli, ExportDot )
{
  const auto parity = run( "export-dot " + sample( "parity.dfa" ) );
  EXPECT_EQ( parity.status, 0 );
  EXPECT_EQ( count( parity.out, "shape=" ), 2u );
  EXPECT_EQ( count( parity.out, "->" ), 4u );
  const auto mod4 = run( "export-dot " + sample( "mod4.dfa" ) );
  EXPECT_EQ( count( mod4.out, "shape=" ), 4u );
  EXPECT_EQ( count( mod4.out, "->" ), 8u );
  EXPECT_EQ( run( "export-dot " + sample( "mod4.dfa" ) ).out, mod4.out );
  EXPECT_EQ( run( "export-dot " + write( "x.dfa", "dfa 1\nstates\n" ) ).status, 2 );
}

TEST_F( Cli, UsageErrors )
{
  EXPECT_EQ( run( "" ).status, 2 );
  EXPECT_EQ( run( "frobnicate" ).status, 2 );
  EXPECT_EQ( run( "experiment nosuch" ).status, 2 );
  EXPECT_EQ( run( "--help" ).status, 0 );
}

TEST_F( Cli, ExperimentWritesStableCsv )
{
  const auto args = "experiment thm3 --seeds 2 --epochs 3 --out " + path( "t3.csv" );
  const auto r = run( args );
  EXPECT_TRUE( r.status == 0 || r.status == 1 ) << r.out;
  EXPECT_NE( r.out.find( "heldout_accuracy" ), std::string::npos ) << r.out;
  const auto csv = read( "t3.csv" );
  EXPECT_EQ( csv.rfind( "config,seed,metric,value\n", 0 ), 0u );
  EXPECT_EQ( count( csv, "\n" ), 5u );
  run( args );
  EXPECT_EQ( read( "t3.csv" ), csv );
}

TEST_F( Cli, Cor31PrintsComposite )
{
  const auto r = run( "experiment cor31 --seeds 2 --epochs 3" );
  EXPECT_TRUE( r.status == 0 || r.status == 1 ) << r.out;
  EXPECT_TRUE( r.out.find( "cor31 PASS" ) != std::string::npos || r.out.find( "cor31 FAIL" ) != std::string::npos )
      << r.out;
  EXPECT_NE( r.out.find( "regular side" ), std::string::npos );
}
