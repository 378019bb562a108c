from detcert.cli import run

run()
