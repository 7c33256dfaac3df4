from collision_kit.cli.main import main

main()
