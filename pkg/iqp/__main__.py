from iqp.cli import main

main()
